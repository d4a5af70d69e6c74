"""Numba kernels for the hot loops: BFS sweeps and the similarity iteration.

All kernels are deterministic for any thread count: parallel loops write
disjoint rows and read only previous-iteration data.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def eccentricity_kernel(indptr, indices, n):
    """BFS from every node; eccentricity is measured within the node's component."""
    ecc = np.zeros(n, np.int64)
    for i in prange(n):
        dist = np.full(n, -1, np.int64)
        queue = np.empty(n, np.int64)
        dist[i] = 0
        queue[0] = i
        head = 0
        tail = 1
        far = 0
        while head < tail:
            j = queue[head]
            head += 1
            dj = dist[j]
            if dj > far:
                far = dj
            for idx in range(indptr[j], indptr[j + 1]):
                q = indices[idx]
                if dist[q] < 0:
                    dist[q] = dj + 1
                    queue[tail] = q
                    tail += 1
        ecc[i] = far
    return ecc


@njit(cache=True, parallel=True)
def threshold_kernel(indptr, indices, n, t_max):
    """Frontier-expanding BFS: T[i, k-1] = fraction of nodes within distance k of i."""
    T = np.zeros((n, t_max))
    for i in prange(n):
        visited = np.zeros(n, np.uint8)
        frontier = np.empty(n, np.int64)
        next_frontier = np.empty(n, np.int64)
        visited[i] = 1
        frontier[0] = i
        flen = 1
        count = 1
        for k in range(t_max):
            nlen = 0
            for fi in range(flen):
                j = frontier[fi]
                for idx in range(indptr[j], indptr[j + 1]):
                    q = indices[idx]
                    if visited[q] == 0:
                        visited[q] = 1
                        count += 1
                        next_frontier[nlen] = q
                        nlen += 1
            T[i, k] = count / n
            tmp = frontier
            frontier = next_frontier
            next_frontier = tmp
            flen = nlen
    return T


@njit(cache=True)
def contribution_kernel(s, c1, b1, c2, b2):
    """Amount a neighbor pair with similarity s may contribute (level-two rule).

    Full s when s clears both thresholds, a discounted net similarity when it
    clears exactly one, zero below both.  The discount maps the pair's
    relative position within the cleared side's [c, b] range onto the other
    side's range; a degenerate cleared range (c == b) pins that position to 0.
    """
    if c1 <= c2:
        cmin = c1
        cmax = c2
    else:
        cmin = c2
        cmax = c1
    if s >= cmax:
        return s
    if s < cmin:
        return 0.0
    if s >= c1:
        # cleared the row-side threshold only
        frac = (s - c1) / (b1 - c1) if b1 - c1 > 0.0 else 0.0
        return 2.0 * s - (frac * (b2 - c2) + c2)
    frac = (s - c2) / (b2 - c2) if b2 - c2 > 0.0 else 0.0
    return 2.0 * s - (frac * (b1 - c1) + c1)


@njit(cache=True)
def accumulate_cell_kernel(
    i,
    u,
    indptr1,
    indices1,
    indptr2,
    indices2,
    S_prev,
    b1_prev,
    b2_prev,
    c1,
    c2,
    svals,
    jarr,
    varr,
    contrib,
    sel1,
    sel2,
    epoch,
):
    """Raw (unnormalized) similarity gathered for one cell (i, u).

    Collects neighbor pairs clearing at least one threshold, walks them in
    descending-similarity order (ties in ascending (j, v)), and lets each
    endpoint contribute at most once.  Selected amounts are summed in value
    order so the total does not depend on tie-break orientation.
    """
    cnt = 0
    for jj in range(indptr1[i], indptr1[i + 1]):
        j = indices1[jj]
        c1j = c1[j]
        for vv in range(indptr2[u], indptr2[u + 1]):
            v = indices2[vv]
            s = S_prev[j, v]
            thr = c1j if c1j <= c2[v] else c2[v]
            if s >= thr:
                svals[cnt] = s
                jarr[cnt] = j
                varr[cnt] = v
                cnt += 1
    if cnt == 0:
        return 0.0
    order = np.argsort(-svals[:cnt], kind="mergesort")
    nsel = 0
    for t in range(cnt):
        p = order[t]
        j = jarr[p]
        v = varr[p]
        if sel1[j] != epoch and sel2[v] != epoch:
            sel1[j] = epoch
            sel2[v] = epoch
            contrib[nsel] = contribution_kernel(
                svals[p], c1[j], b1_prev[j], c2[v], b2_prev[v]
            )
            nsel += 1
    amounts = np.sort(contrib[:nsel])
    total = 0.0
    for t in range(nsel):
        total += amounts[t]
    return total


@njit(cache=True, parallel=True)
def iterate_kernel(
    indptr1, indices1, indptr2, indices2, S_prev, b1_prev, b2_prev, c1, c2, col_den
):
    """One full similarity sweep; returns the normalized next matrix."""
    n1 = S_prev.shape[0]
    n2 = S_prev.shape[1]
    S_new = np.zeros((n1, n2))
    max_deg2 = 0
    for u in range(n2):
        d = indptr2[u + 1] - indptr2[u]
        if d > max_deg2:
            max_deg2 = d
    for i in prange(n1):
        deg_i = indptr1[i + 1] - indptr1[i]
        if deg_i == 0 or max_deg2 == 0:
            continue
        row_den = 0.0
        for idx in range(indptr1[i], indptr1[i + 1]):
            row_den += b1_prev[indices1[idx]]
        cap = deg_i * max_deg2
        svals = np.empty(cap)
        jarr = np.empty(cap, np.int64)
        varr = np.empty(cap, np.int64)
        contrib = np.empty(cap)
        sel1 = np.full(n1, -1, np.int64)
        sel2 = np.full(n2, -1, np.int64)
        for u in range(n2):
            if indptr2[u + 1] == indptr2[u]:
                continue
            den = row_den if row_den >= col_den[u] else col_den[u]
            if den <= 0.0:
                continue
            raw = accumulate_cell_kernel(
                i,
                u,
                indptr1,
                indices1,
                indptr2,
                indices2,
                S_prev,
                b1_prev,
                b2_prev,
                c1,
                c2,
                svals,
                jarr,
                varr,
                contrib,
                sel1,
                sel2,
                u,
            )
            if raw > 0.0:
                S_new[i, u] = raw / den
    return S_new


def warmup() -> None:
    """Compile all kernels on tiny inputs so timed runs exclude JIT cost."""
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int32)
    eccentricity_kernel(indptr, indices, 2)
    threshold_kernel(indptr, indices, 2, 1)
    S = np.ones((2, 2))
    ones = np.ones(2)
    half = np.full(2, 0.5)
    iterate_kernel(indptr, indices, indptr, indices, S, ones, ones, half, half, ones)

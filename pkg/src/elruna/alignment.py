"""Extract an injective node mapping from a converged similarity matrix."""

from __future__ import annotations

import heapq
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .graph import Graph, LabelMap
from .similarity import SimilarityState


class Alignment:
    """Injective mapping of every g1 node onto a distinct g2 node."""

    __slots__ = ("forward", "inverse")

    def __init__(self, forward: np.ndarray, n2: int):
        forward = np.asarray(forward, dtype=np.int64)
        if forward.size and (forward.min() < 0 or forward.max() >= n2):
            raise ValueError("alignment target out of range")
        inverse = np.full(n2, -1, dtype=np.int64)
        inverse[forward] = np.arange(forward.size)
        if forward.size and (inverse >= 0).sum() != forward.size:
            raise ValueError("alignment is not injective")
        self.forward = forward
        self.inverse = inverse

    @property
    def n1(self) -> int:
        return self.forward.size

    @property
    def n2(self) -> int:
        return self.inverse.size

    def image(self, i: int) -> int:
        return int(self.forward[i])

    def inverse_of(self, u: int) -> int | None:
        i = int(self.inverse[u])
        return None if i < 0 else i

    def aligned_g2_nodes(self) -> np.ndarray:
        """Aligned g2 ids, ascending."""
        return np.flatnonzero(self.inverse >= 0)

    def replace(self, forward: np.ndarray) -> "Alignment":
        return Alignment(forward, self.n2)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Alignment)
            and self.n2 == other.n2
            and np.array_equal(self.forward, other.forward)
        )

    def __hash__(self):  # pragma: no cover - identity hashing only
        return id(self)

    def __repr__(self) -> str:
        return f"Alignment(n1={self.n1}, n2={self.n2})"


def naive_align(state: SimilarityState) -> Alignment:
    """Walk all pairs by descending similarity, aligning when both ends are free.

    Ties break toward the ascending (i, u) pair so extraction is deterministic.
    """
    n1, n2 = state.shape
    if n1 > n2:
        raise ValueError("need n1 <= n2; swap the graphs before extraction")
    order = np.argsort(-state.S, axis=None, kind="stable")
    forward = np.full(n1, -1, dtype=np.int64)
    col_used = np.zeros(n2, dtype=bool)
    aligned = 0
    for flat in order:
        i, u = divmod(int(flat), n2)
        if forward[i] >= 0 or col_used[u]:
            continue
        forward[i] = u
        col_used[u] = True
        aligned += 1
        if aligned == n1:
            break
    return Alignment(forward, n2)


def default_delta(state: SimilarityState) -> float:
    """Boost at the similarity scale (the current matrix peak).

    A boost this size lets anchored pairs recruit their cross-network
    neighborhoods ahead of unanchored look-alikes, which is what makes the
    extraction robust to added-edge noise; any positive value still breaks
    exact ties between symmetric nodes.
    """
    peak = float(state.S.max()) if state.S.size else 0.0
    return peak if peak > 0 else 1.0


def seed_and_extend_align(
    state: SimilarityState, g1: Graph, g2: Graph, delta: float | None = None
) -> Alignment:
    """Greedy extraction where each aligned pair boosts its neighbor pairs.

    Repeatedly takes the unaligned pair with the highest working similarity,
    aligns it, and adds delta to every pair of unaligned cross-network
    neighbors, so already-anchored regions pull their surroundings into
    place.  Stale queue entries (recorded value differs from the current
    working value) are skipped lazily.  The input state is never mutated.
    """
    n1, n2 = state.shape
    if n1 > n2:
        raise ValueError("need n1 <= n2; swap the graphs before extraction")
    if delta is None:
        delta = default_delta(state)
    if delta <= 0:
        raise ValueError("delta must be positive")

    original = state.S
    working = original.copy()
    # base queue: all pairs presorted by (similarity desc, (i, u) asc); pairs
    # that have been boosted are served by the heap instead
    order = np.argsort(-original, axis=None, kind="stable")
    ptr = 0
    heap: list[tuple[float, int, int]] = []
    forward = np.full(n1, -1, dtype=np.int64)
    row_used = np.zeros(n1, dtype=bool)
    col_used = np.zeros(n2, dtype=bool)
    inserted = n1 * n2
    aligned = 0

    while aligned < n1:
        while ptr < order.size:
            i, u = divmod(int(order[ptr]), n2)
            if row_used[i] or col_used[u] or working[i, u] != original[i, u]:
                ptr += 1
                continue
            break
        base = None
        if ptr < order.size:
            i, u = divmod(int(order[ptr]), n2)
            base = (-working[i, u], i, u)
        while heap:
            key = heap[0]
            if row_used[key[1]] or col_used[key[2]] or working[key[1], key[2]] != -key[0]:
                heapq.heappop(heap)
                continue
            break
        boosted = heap[0] if heap else None

        if base is None and boosted is None:  # pragma: no cover - queue cannot drain
            raise RuntimeError("candidate queues exhausted before full alignment")
        if boosted is None or (base is not None and base <= boosted):
            pick = base
            ptr += 1
        else:
            pick = heapq.heappop(heap)
        _, i, u = pick

        forward[i] = u
        row_used[i] = True
        col_used[u] = True
        aligned += 1
        for j in g1.neighbors(i):
            if row_used[j]:
                continue
            for v in g2.neighbors(u):
                if col_used[v]:
                    continue
                working[j, v] += delta
                heapq.heappush(heap, (-working[j, v], int(j), int(v)))
                inserted += 1

    degs2 = g2.degrees
    bound = n1 * n2 + int(np.sum(g1.degrees * degs2[forward]))
    assert inserted <= bound, "queue insertions exceeded the degree-product bound"
    return Alignment(forward, n2)


def pair_similarities(state: SimilarityState, alignment: Alignment) -> np.ndarray:
    """Similarity of each aligned pair, indexed by g1 node."""
    return state.S[np.arange(alignment.n1), alignment.forward]


def _label_sort_key(label: str):
    try:
        return (0, int(label), label)
    except ValueError:
        return (1, 0, label)


def write_alignment(
    target: IO[str] | str | Path,
    alignment: Alignment,
    similarities: Iterable[float],
    labels1: LabelMap,
    labels2: LabelMap,
) -> None:
    """TSV rows g1_label, g2_label, similarity, sorted by g1 label."""
    if isinstance(target, (str, Path)):
        with open(target, "w") as fh:
            write_alignment(fh, alignment, similarities, labels1, labels2)
        return
    rows = [
        (labels1.label_of(i), labels2.label_of(int(u)), sim)
        for (i, u), sim in zip(enumerate(alignment.forward), similarities)
    ]
    rows.sort(key=lambda r: _label_sort_key(r[0]))
    for a, b, sim in rows:
        target.write(f"{a}\t{b}\t{sim:.12g}\n")


def read_alignment(
    source: IO[str] | str | Path, labels1: LabelMap, labels2: LabelMap
) -> Alignment:
    """Read the TSV format back into an alignment over internal ids."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return read_alignment(fh, labels1, labels2)
    forward = np.full(len(labels1), -1, dtype=np.int64)
    for line in source:
        line = line.rstrip("\n")
        if not line:
            continue
        a, b = line.split("\t")[:2]
        forward[labels1.id_of(a)] = labels2.id_of(b)
    if (forward < 0).any():
        raise ValueError("alignment file does not cover every g1 node")
    return Alignment(forward, len(labels2))

"""Post-processing searches over an alignment.

The baseline permutes targets of random node subsets.  The random-walk
variant first scores per-node violations, propagates them over the merged
graph in a PageRank fashion, and slides a search window along the resulting
mismatch ranking so effort concentrates where the alignment is worst.
"""

from __future__ import annotations

import csv
import itertools
import time
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .alignment import Alignment
from .generators import make_rng
from .graph import Graph
from .metrics import conserved_edges


class NoMismatchError(Exception):
    """The alignment has no violations; there is nothing to propagate."""


@dataclass
class SearchConfig:
    subset_size: int = 6
    window_size: int = 50
    window_step: int = 10
    stall_before_slide: int = 100
    stall_terminate: int = 1000
    rng_seed: int = 0
    alpha: float = 0.85
    propagation_tol: float = 1e-10
    propagation_max_iter: int = 1000

    def __post_init__(self):
        if self.subset_size < 2:
            raise ValueError("subset_size must be at least 2")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.window_size < 1 or self.window_step < 1:
            raise ValueError("window_size and window_step must be positive")
        if self.window_step > self.window_size:
            raise ValueError("window_step must not exceed window_size")
        if self.stall_before_slide < 1 or self.stall_terminate < 1:
            raise ValueError("stall limits must be positive")


@dataclass
class MismatchState:
    """Violation counts and their degree-normalized distribution.

    Entries 0..n1-1 cover g1 nodes; the rest cover aligned g2 nodes in
    ascending id order (the merged-graph node order).
    """

    raw: np.ndarray
    normalized: np.ndarray

    @property
    def total(self) -> int:
        return int(self.raw.sum())


@dataclass
class MergeResult:
    """The merged graph: g1, the aligned-induced part of g2, and link edges."""

    graph: Graph
    #: aligned g2 ids ascending; merged id of slot t is n1 + t
    g2_nodes: np.ndarray
    #: merged id for each g2 node, -1 where unaligned
    g2_to_merged: np.ndarray


def compute_violations(a: Alignment, g1: Graph, g2: Graph) -> MismatchState:
    """Count, per node, how many of its neighbors the alignment fails to conserve.

    The g2 side is evaluated on the subgraph induced by aligned nodes, via the
    inverse map.  Raw counts are divided by the node's degree in its own
    graph (0 for isolated nodes), then scaled to unit L1 norm.
    """
    n1 = g1.node_count
    forward = a.forward
    g2_nodes = a.aligned_g2_nodes()
    slot = {int(u): t for t, u in enumerate(g2_nodes)}

    raw = np.zeros(n1 + g2_nodes.size, dtype=np.int64)
    deg = np.zeros(n1 + g2_nodes.size, dtype=np.int64)
    for i in range(n1):
        nbrs = g1.neighbors(i)
        deg[i] = nbrs.size
        fi = int(forward[i])
        raw[i] = sum(1 for j in nbrs if not g2.has_edge(fi, int(forward[j])))
    inverse = a.inverse
    for t, u in enumerate(g2_nodes):
        iu = int(inverse[u])
        for v in g2.neighbors(u):
            iv = int(inverse[v])
            if iv < 0:
                continue
            deg[n1 + t] += 1
            if not g1.has_edge(iu, iv):
                raw[n1 + t] += 1

    normalized = np.zeros(raw.size)
    nz = deg > 0
    normalized[nz] = raw[nz] / deg[nz]
    total = normalized.sum()
    if total > 0:
        normalized /= total
    return MismatchState(raw, normalized)


def merge_graphs(a: Alignment, g1: Graph, g2: Graph) -> MergeResult:
    """Disjoint union of g1 and the aligned-induced part of g2, plus one edge
    linking each aligned pair."""
    n1 = g1.node_count
    g2_nodes = a.aligned_g2_nodes()
    g2_to_merged = np.full(g2.node_count, -1, dtype=np.int64)
    g2_to_merged[g2_nodes] = n1 + np.arange(g2_nodes.size)

    edges: list[tuple[int, int]] = list(g1.edges())
    for u in g2_nodes:
        mu = int(g2_to_merged[u])
        for v in g2.neighbors(u):
            mv = int(g2_to_merged[v])
            if mv > mu:
                edges.append((mu, mv))
    for i in range(n1):
        edges.append((i, int(g2_to_merged[a.forward[i]])))
    merged = Graph.from_edges(n1 + g2_nodes.size, edges)
    return MergeResult(merged, g2_nodes, g2_to_merged)


@dataclass
class PropagationResult:
    R: np.ndarray
    iterations: int
    converged: bool
    #: L1 mass of R after each step (stays 1 up to float drift)
    step_sums: list[float] = field(default_factory=list)
    #: L1 distance between consecutive iterates
    step_changes: list[float] = field(default_factory=list)


def propagate_mismatch(
    g3: Graph,
    o: np.ndarray,
    alpha: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> PropagationResult:
    """Power iteration R <- alpha * C D^-1 R + (1 - alpha) * o from uniform R.

    o is the teleportation distribution (unit L1).  Raises NoMismatchError
    when o is all zero, in which case callers skip the local search.
    """
    n = g3.node_count
    o = np.asarray(o, dtype=np.float64)
    if o.shape != (n,):
        raise ValueError("teleportation vector length must match the graph")
    if o.sum() == 0:
        raise NoMismatchError("all violations are zero")
    if abs(o.sum() - 1.0) > 1e-8:
        raise ValueError("teleportation vector must have unit L1 norm")
    deg = g3.degrees.astype(np.float64)
    if (deg == 0).any():
        raise ValueError("merged graph must have no isolated nodes")

    R = np.full(n, 1.0 / n)
    teleport = (1.0 - alpha) * o
    result = PropagationResult(R, 0, False)
    for step in range(1, max_iter + 1):
        spread = (R / deg)[g3.indices]
        R_new = alpha * np.add.reduceat(spread, g3.indptr[:-1]) + teleport
        change = float(np.abs(R_new - R).sum())
        result.step_sums.append(float(R_new.sum()))
        result.step_changes.append(change)
        R = R_new
        result.iterations = step
        if change < tol:
            result.converged = True
            break
    result.R = R
    return result


def rank_mismatched(R: np.ndarray, node_count: int) -> np.ndarray:
    """g1 nodes ordered by propagated mismatch descending, ties by id ascending."""
    return np.argsort(-R[:node_count], kind="stable")


def _block_conserved(
    a: Alignment, g1: Graph, g2: Graph, subset: np.ndarray, targets: np.ndarray
) -> int:
    """Conserved edges restricted to edges touching the subset, internal edges
    counted once."""
    pos = {int(node): t for t, node in enumerate(subset)}
    total = 0
    for t, i in enumerate(subset):
        ti = int(targets[t])
        for j in g1.neighbors(int(i)):
            pj = pos.get(int(j))
            if pj is None:
                total += g2.has_edge(ti, int(a.forward[j]))
            elif i < j:
                total += g2.has_edge(ti, int(targets[pj]))
    return total


def block_objective_delta(
    a: Alignment,
    g1: Graph,
    g2: Graph,
    subset: np.ndarray,
    candidate_targets: np.ndarray,
) -> int:
    """Conserved-edge change from reassigning the subset's targets.

    Only edges with at least one endpoint in the subset can change status,
    so the delta against the full objective equals the restricted recount.
    """
    subset = np.asarray(subset, dtype=np.int64)
    candidate_targets = np.asarray(candidate_targets, dtype=np.int64)
    if np.unique(subset).size != subset.size:
        raise ValueError("subset nodes must be distinct")
    current = a.forward[subset]
    if not np.array_equal(np.sort(candidate_targets), np.sort(current)):
        raise ValueError("candidate must permute the subset's current targets")
    return _block_conserved(a, g1, g2, subset, candidate_targets) - _block_conserved(
        a, g1, g2, subset, current
    )


@dataclass
class TraceRow:
    iteration: int
    window_start: int
    accepted_delta: int
    conserved: int
    wall_ms: float


@dataclass
class SearchResult:
    alignment: Alignment
    #: total iterations until the stall criterion fired
    iterations: int
    #: iteration index of the last accepted move (0 when none)
    last_improvement: int
    conserved: int
    trace: list[TraceRow] = field(default_factory=list)


def write_trace(fh: IO[str], rows: list[TraceRow]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["iteration", "window_start", "accepted_delta", "conserved", "wall_ms"])
    for r in rows:
        writer.writerow(
            [r.iteration, r.window_start, r.accepted_delta, r.conserved, f"{r.wall_ms:.3f}"]
        )


_PERM_CACHE: dict[int, np.ndarray] = {}


def _permutation_table(k: int) -> np.ndarray:
    table = _PERM_CACHE.get(k)
    if table is None:
        table = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
        _PERM_CACHE[k] = table
    return table


class _BlockSearch:
    """Shared engine: enumerate target permutations of a subset, apply the best.

    Every candidate's restricted conserved count is evaluated in one
    vectorized pass; the identity permutation comes first, so deltas read
    directly off the score vector.
    """

    def __init__(self, a: Alignment, g1: Graph, g2: Graph):
        self.g1 = g1
        self.g2 = g2
        self.forward = a.forward.copy()
        self.n2 = a.n2
        self.B = g2.dense_adjacency(np.uint8)
        self.conserved = conserved_edges(a, g1, g2)
        self._in_subset = np.zeros(g1.node_count, dtype=bool)
        self._pos = np.full(g1.node_count, -1, dtype=np.int64)

    def evaluate(self, subset: np.ndarray) -> int:
        """Try all permutations of the subset's targets; apply and return the
        best strictly positive delta, else 0."""
        k = subset.size
        perms = _permutation_table(k)
        targets = self.forward[subset]
        self._in_subset[subset] = True
        self._pos[subset] = np.arange(k)

        gain = np.zeros((k, k), dtype=np.int64)
        internal: list[tuple[int, int]] = []
        Bt = self.B[targets]
        for t, node in enumerate(subset):
            nbrs = self.g1.neighbors(int(node))
            inside = self._in_subset[nbrs]
            outside = nbrs[~inside]
            if outside.size:
                gain[t] = Bt[:, self.forward[outside]].sum(axis=1)
            for j in nbrs[inside]:
                pj = int(self._pos[j])
                if pj > t:
                    internal.append((t, pj))

        score = gain[np.arange(k), perms].sum(axis=1)
        Bsub = self.B[np.ix_(targets, targets)]
        for t1, t2 in internal:
            score = score + Bsub[perms[:, t1], perms[:, t2]]

        best = int(np.argmax(score))
        delta = int(score[best] - score[0])
        if delta > 0:
            self.forward[subset] = targets[perms[best]]
            self.conserved += delta
        self._in_subset[subset] = False
        self._pos[subset] = -1
        return delta

    def finish(self) -> tuple[Alignment, int]:
        final = Alignment(self.forward, self.n2)
        recount = conserved_edges(final, self.g1, self.g2)
        assert recount == self.conserved, "incremental conserved count drifted"
        return final, recount


def baseline_search(
    a: Alignment, g1: Graph, g2: Graph, cfg: SearchConfig
) -> SearchResult:
    """Permutation search over uniformly random subsets of all g1 nodes.

    Accepts only strictly improving moves; stops after stall_terminate
    consecutive non-improving iterations.
    """
    n1 = g1.node_count
    if cfg.subset_size > n1:
        raise ValueError("subset_size exceeds the number of g1 nodes")
    rng = make_rng(cfg.rng_seed)
    engine = _BlockSearch(a, g1, g2)
    start = time.perf_counter()
    trace: list[TraceRow] = []
    stall = 0
    it = 0
    last_improvement = 0
    while stall < cfg.stall_terminate:
        it += 1
        subset = np.sort(rng.choice(n1, size=cfg.subset_size, replace=False))
        delta = engine.evaluate(subset)
        if delta > 0:
            stall = 0
            last_improvement = it
            trace.append(
                TraceRow(it, -1, delta, engine.conserved, 1e3 * (time.perf_counter() - start))
            )
        else:
            stall += 1
    alignment, conserved = engine.finish()
    return SearchResult(alignment, it, last_improvement, conserved, trace)


def rawsem_search(
    a: Alignment, g1: Graph, g2: Graph, cfg: SearchConfig
) -> SearchResult:
    """Windowed permutation search guided by propagated mismatch.

    Ranks g1 nodes by the converged random-walk mismatch, then samples
    subsets from a window that starts at the most mismatched nodes and
    slides forward after stall_before_slide non-improving iterations.
    A violation-free alignment returns unchanged with zero iterations.
    """
    n1 = g1.node_count
    if cfg.subset_size > n1:
        raise ValueError("subset_size exceeds the number of g1 nodes")
    violations = compute_violations(a, g1, g2)
    if violations.total == 0:
        return SearchResult(a, 0, 0, conserved_edges(a, g1, g2))
    merged = merge_graphs(a, g1, g2)
    prop = propagate_mismatch(
        merged.graph,
        violations.normalized,
        cfg.alpha,
        cfg.propagation_tol,
        cfg.propagation_max_iter,
    )
    ranking = rank_mismatched(prop.R, n1)

    rng = make_rng(cfg.rng_seed)
    engine = _BlockSearch(a, g1, g2)
    start = time.perf_counter()
    trace: list[TraceRow] = []
    window = min(cfg.window_size, n1)
    max_start = n1 - window
    win_start = 0
    sample_size = min(cfg.subset_size, window)
    global_stall = 0
    window_stall = 0
    it = 0
    last_improvement = 0
    while global_stall < cfg.stall_terminate:
        it += 1
        pool = ranking[win_start : win_start + window]
        subset = np.sort(rng.choice(pool, size=sample_size, replace=False))
        delta = engine.evaluate(subset)
        if delta > 0:
            global_stall = 0
            window_stall = 0
            last_improvement = it
            trace.append(
                TraceRow(
                    it, win_start, delta, engine.conserved, 1e3 * (time.perf_counter() - start)
                )
            )
        else:
            global_stall += 1
            window_stall += 1
            if window_stall >= cfg.stall_before_slide:
                win_start = min(win_start + cfg.window_step, max_start)
                window_stall = 0
    alignment, conserved = engine.finish()
    return SearchResult(alignment, it, last_improvement, conserved, trace)

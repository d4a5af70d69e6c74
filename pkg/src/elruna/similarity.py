"""Iterative cross-network similarity under the elimination rules.

Each sweep recomputes every cell S[i, u] from the previous iteration only:
neighbor pairs clearing a growing contribution threshold are considered in
descending-similarity order, each endpoint contributes at most once, and the
accumulated sum is normalized by the larger neighborhood mass.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable

import numpy as np

from . import _kernels
from .graph import Graph, diameter
from .threshold import ThresholdMatrix, compute_thresholds

_DUMP_MAGIC = b"ELRS"
_DUMP_HEADER = struct.Struct("<4sIII")


@dataclass
class SimilarityState:
    """Iteration snapshot: dense similarity matrix plus row/column maxima."""

    S: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    iteration: int

    @classmethod
    def initial(cls, n1: int, n2: int) -> "SimilarityState":
        # uniform start: every pair equally similar, so the maxima are all ones
        return cls(np.ones((n1, n2)), np.ones(n1), np.ones(n2), 0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.S.shape


@dataclass
class ContributionContext:
    """Per-node contribution floors c = b * visit_fraction for one iteration."""

    c1: np.ndarray
    c2: np.ndarray

    @classmethod
    def from_state(
        cls, state: SimilarityState, t1: ThresholdMatrix, t2: ThresholdMatrix
    ) -> "ContributionContext":
        c1 = state.b1 * t1.column(min(state.iteration, t1.t_max))
        c2 = state.b2 * t2.column(min(state.iteration, t2.t_max))
        return cls(c1, c2)


def contribution_amount(s: float, c1j: float, b1j: float, c2v: float, b2v: float) -> float:
    """Contribution of one neighbor pair with similarity s.

    Returns s when s clears both thresholds, the discounted net similarity
    when it clears exactly one, and 0 below both.  The discount interpolates
    the pair's position in the cleared side's [c, b] range onto the other
    side's range; a collapsed cleared range (c == b) reads as position 0.
    """
    return float(_kernels.contribution_kernel(s, c1j, b1j, c2v, b2v))


def accumulate_pair(
    i: int,
    u: int,
    prev: SimilarityState,
    ctx: ContributionContext,
    g1: Graph,
    g2: Graph,
) -> float:
    """Raw similarity gathered for cell (i, u) before normalization.

    Candidate neighbor pairs must clear the smaller of their two thresholds;
    they are consumed in descending-similarity order with each endpoint used
    at most once.  The returned sum is unnormalized and may be negative when
    discounted contributions dominate.
    """
    n1, n2 = prev.shape
    cap = max(1, g1.degree(i) * g2.degree(u))
    svals = np.empty(cap)
    jarr = np.empty(cap, np.int64)
    varr = np.empty(cap, np.int64)
    contrib = np.empty(cap)
    sel1 = np.full(n1, -1, np.int64)
    sel2 = np.full(n2, -1, np.int64)
    return float(
        _kernels.accumulate_cell_kernel(
            i,
            u,
            g1.indptr,
            g1.indices,
            g2.indptr,
            g2.indices,
            prev.S,
            prev.b1,
            prev.b2,
            ctx.c1,
            ctx.c2,
            svals,
            jarr,
            varr,
            contrib,
            sel1,
            sel2,
            0,
        )
    )


def _neighbor_mass(g: Graph, b: np.ndarray) -> np.ndarray:
    """For each node, the sum of b over its neighbors."""
    if g.indices.size == 0:
        return np.zeros(g.node_count)
    sums = np.zeros(g.node_count)
    np.add.at(sums, np.repeat(np.arange(g.node_count), g.degrees), b[g.indices])
    return sums


def iterate(
    prev: SimilarityState,
    t1: ThresholdMatrix,
    t2: ThresholdMatrix,
    g1: Graph,
    g2: Graph,
) -> SimilarityState:
    """One sweep: accumulate every cell from iteration-k data, then normalize.

    Cell (i, u) divides its raw sum by max over the two neighborhoods of the
    previous best-similarity mass (0 when that denominator is 0); negative
    raw sums floor at 0 so similarities stay in [0, 1].
    """
    ctx = ContributionContext.from_state(prev, t1, t2)
    col_den = _neighbor_mass(g2, prev.b2)
    S_new = _kernels.iterate_kernel(
        g1.indptr,
        g1.indices,
        g2.indptr,
        g2.indices,
        prev.S,
        prev.b1,
        prev.b2,
        ctx.c1,
        ctx.c2,
        col_den,
    )
    b1 = S_new.max(axis=1) if S_new.size else np.zeros(g1.node_count)
    b2 = S_new.max(axis=0) if S_new.size else np.zeros(g2.node_count)
    return SimilarityState(S_new, b1, b2, prev.iteration + 1)


def run_similarity(
    g1: Graph,
    g2: Graph,
    t_max: int | None = None,
    iteration_callback: Callable[[int, float], None] | None = None,
) -> SimilarityState:
    """Run the full similarity computation from the all-ones start.

    t_max defaults to the larger of the two diameters.  The optional callback
    receives (iteration index, seconds) after each sweep.
    """
    if g1.node_count == 0 or g2.node_count == 0:
        raise ValueError("both graphs must be nonempty")
    if t_max is None:
        t_max = max(diameter(g1), diameter(g2))
    if t_max < 1:
        raise ValueError("iteration budget t_max must be at least 1")
    t1 = compute_thresholds(g1, t_max)
    t2 = compute_thresholds(g2, t_max)
    state = SimilarityState.initial(g1.node_count, g2.node_count)
    if iteration_callback is None:
        for _ in range(t_max):
            state = iterate(state, t1, t2, g1, g2)
        return state
    import time

    for _ in range(t_max):
        start = time.perf_counter()
        state = iterate(state, t1, t2, g1, g2)
        iteration_callback(state.iteration, time.perf_counter() - start)
    return state


def save_similarity(target: IO[bytes] | str | Path, state: SimilarityState) -> None:
    """Binary dump: 16-byte header (magic, n1, n2, k) then row-major LE doubles."""
    if isinstance(target, (str, Path)):
        with open(target, "wb") as fh:
            save_similarity(fh, state)
        return
    n1, n2 = state.shape
    target.write(_DUMP_HEADER.pack(_DUMP_MAGIC, n1, n2, state.iteration))
    target.write(np.ascontiguousarray(state.S, dtype="<f8").tobytes())


def load_similarity(source: IO[bytes] | str | Path) -> SimilarityState:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return load_similarity(fh)
    header = source.read(_DUMP_HEADER.size)
    magic, n1, n2, k = _DUMP_HEADER.unpack(header)
    if magic != _DUMP_MAGIC:
        raise ValueError("not a similarity dump (bad magic)")
    data = np.frombuffer(source.read(8 * n1 * n2), dtype="<f8").reshape(n1, n2)
    S = data.astype(np.float64)
    b1 = S.max(axis=1) if S.size else np.zeros(n1)
    b2 = S.max(axis=0) if S.size else np.zeros(n2)
    return SimilarityState(S, b1, b2, int(k))

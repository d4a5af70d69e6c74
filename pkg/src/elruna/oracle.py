"""Brute-force references for property tests and acceptance audits."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .alignment import Alignment
from .graph import Graph
from .metrics import conserved_edges


@dataclass
class ExactResult:
    best_conserved: int
    best_alignment: Alignment
    permutations_examined: int


def exact_align(g1: Graph, g2: Graph, limit: int = 2_000_000) -> ExactResult:
    """Enumerate every injection V1 -> V2 and return the conserved-edge optimum.

    Ties resolve to the lexicographically least forward array.  Guarded by an
    enumeration budget since the count grows as n2!/(n2-n1)!.
    """
    n1, n2 = g1.node_count, g2.node_count
    if n1 > 8:
        raise ValueError("exact enumeration limited to n1 <= 8")
    if n1 > n2:
        raise ValueError("need n1 <= n2")
    total = math.perm(n2, n1)
    if total > limit:
        raise ValueError(f"{total} injections exceed limit {limit}")

    edges = list(g1.edges())
    adj2 = g2.dense_adjacency(dtype=bool)
    best = -1
    best_forward: tuple[int, ...] | None = None
    examined = 0
    for cand in itertools.permutations(range(n2), n1):
        examined += 1
        score = 0
        for u, v in edges:
            if adj2[cand[u], cand[v]]:
                score += 1
        if score > best:
            best = score
            best_forward = cand
    assert best_forward is not None
    result = ExactResult(
        best, Alignment(np.array(best_forward, dtype=np.int64), n2), examined
    )
    assert result.permutations_examined == total
    return result


def audit_best_matching(g1: Graph, g2: Graph, a: Alignment) -> bool:
    """Check each node sits at a best matching given the rest of the alignment.

    Retargeting any single g1 node to any unused g2 node must not increase
    that node's conserved-neighbor count.  This is the necessary condition
    for optimality of an all-best-matching alignment; the sufficiency
    direction is not checked.
    """
    adj2 = g2.dense_adjacency(dtype=bool)
    forward = a.forward
    free = np.flatnonzero(a.inverse < 0)
    for i in range(g1.node_count):
        neigh_imgs = forward[g1.neighbors(i)]
        current = int(adj2[forward[i], neigh_imgs].sum())
        for u in free:
            if int(adj2[u, neigh_imgs].sum()) > current:
                return False
    return True


def audit_theorem1(g1: Graph, g2: Graph, result: ExactResult) -> bool:
    """Verdict of the best-matching audit on an exact optimum."""
    actual = conserved_edges(result.best_alignment, g1, g2)
    if actual != result.best_conserved:
        return False
    return audit_best_matching(g1, g2, result.best_alignment)

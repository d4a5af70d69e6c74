"""Benchmark instance generators: preferential-attachment graphs and noisy
permuted copies with recorded ground truth.

All randomness flows from a 64-bit seed through a counter-based Philox
generator, so instances are reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .graph import Graph


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; cheap to construct, stable across platforms."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass
class NoiseSpec:
    """Fraction p of |E1| edges to add among non-adjacent pairs."""

    p: float
    rng_seed: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("noise fraction p must be in [0, 1]")

    def added_edges(self, edge_count: int) -> int:
        return round(self.p * edge_count)


@dataclass
class GroundTruth:
    """Node permutation used to scramble labels: original i maps to permutation[i]."""

    permutation: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        n = perm.size
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise ValueError("permutation is not a bijection on 0..n-1")
        self.permutation = perm

    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.permutation)
        inv[self.permutation] = np.arange(self.permutation.size)
        return inv

    def write(self, target: IO[str] | str | Path) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w") as fh:
                self.write(fh)
            return
        for i, u in enumerate(self.permutation):
            target.write(f"{i}\t{u}\n")

    @classmethod
    def read(cls, source: IO[str] | str | Path) -> "GroundTruth":
        if isinstance(source, (str, Path)):
            with open(source) as fh:
                return cls.read(fh)
        pairs = []
        for line in source:
            line = line.strip()
            if not line:
                continue
            a, b = line.split("\t")
            pairs.append((int(a), int(b)))
        perm = np.empty(len(pairs), dtype=np.int64)
        for a, b in pairs:
            perm[a] = b
        return cls(perm)


def _random_distinct(repeated: list[int], k: int, rng: np.random.Generator) -> list[int]:
    """k distinct picks from the repeated-node list, first-occurrence order."""
    chosen: list[int] = []
    seen: set[int] = set()
    while len(chosen) < k:
        x = repeated[int(rng.integers(len(repeated)))]
        if x not in seen:
            seen.add(x)
            chosen.append(x)
    return chosen


def _preferential_graph(n: int, attach: int, q: float, rng: np.random.Generator) -> Graph:
    """Preferential attachment from a star seed; with probability q each extra
    link closes a triangle through the latest target instead."""
    if attach < 1 or n <= attach:
        raise ValueError("need n > attach >= 1")
    if not 0.0 <= q <= 1.0:
        raise ValueError("triangle probability q must be in [0, 1]")
    edges: list[tuple[int, int]] = [(0, leaf) for leaf in range(1, attach + 1)]
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    # one entry per edge endpoint: sampling from it is degree-proportional
    repeated: list[int] = [0] * attach + list(range(1, attach + 1))

    def link(a: int, b: int) -> None:
        edges.append((a, b))
        adj[a].add(b)
        adj[b].add(a)
        repeated.append(b)

    for source in range(attach + 1, n):
        targets = _random_distinct(repeated, attach, rng)
        target = targets.pop()
        link(source, target)
        count = 1
        while count < attach:
            if q > 0.0 and rng.random() < q:
                pool = sorted(adj[target] - adj[source] - {source})
                if pool:
                    nbr = pool[int(rng.integers(len(pool)))]
                    link(source, nbr)
                    count += 1
                    continue
            target = targets.pop()
            link(source, target)
            count += 1
        repeated.extend([source] * attach)
    return Graph.from_edges(n, edges)


def generate_ba(n: int, attach: int, seed: int) -> Graph:
    """Preferential-attachment random graph, deterministic in the seed."""
    return _preferential_graph(n, attach, 0.0, make_rng(seed))


def generate_hk(n: int, attach: int, q: float, seed: int) -> Graph:
    """Preferential attachment with triangle closure probability q.

    At q = 0 the triangle branch never draws, so the construction (and the
    consumed random stream) degenerates exactly to generate_ba.
    """
    return _preferential_graph(n, attach, q, make_rng(seed))


def perturb(g: Graph, spec: NoiseSpec) -> tuple[Graph, GroundTruth]:
    """Permute node labels, then add round(p*m) edges among non-adjacent pairs.

    Original edges all survive under the permutation image, so the returned
    ground truth always attains edge correctness 1 on (g, output).
    """
    n = g.node_count
    rng = make_rng(spec.rng_seed)
    perm = rng.permutation(n).astype(np.int64)
    truth = GroundTruth(perm)

    extra = spec.added_edges(g.edge_count)
    capacity = n * (n - 1) // 2 - g.edge_count
    if extra > capacity:
        raise ValueError(
            f"cannot add {extra} edges: only {capacity} non-adjacent pairs available"
        )

    base = g.edge_array()
    mapped = np.column_stack((perm[base[:, 0]], perm[base[:, 1]])) if base.size else base
    present: set[tuple[int, int]] = set()
    for a, b in mapped:
        present.add((int(a), int(b)) if a < b else (int(b), int(a)))

    noise: list[tuple[int, int]] = []
    while len(noise) < extra:
        a = int(rng.integers(n))
        b = int(rng.integers(n))
        if a == b:
            continue
        key = (a, b) if a < b else (b, a)
        if key in present:
            continue
        present.add(key)
        noise.append(key)

    all_edges = [(int(a), int(b)) for a, b in mapped] + noise
    return Graph.from_edges(n, all_edges), truth

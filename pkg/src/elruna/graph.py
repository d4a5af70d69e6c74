"""Immutable undirected simple graphs with CSR adjacency storage.

Node ids are dense 0-based integers internally; arbitrary external labels
from edge-list files live in a :class:`LabelMap` and are restored on output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from . import _kernels


class ParseError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class Graph:
    """Undirected simple graph: no self-loops, no duplicate edges, symmetric.

    Immutable after construction.  Adjacency is stored CSR-style: the
    neighbors of node ``i`` are ``indices[indptr[i]:indptr[i+1]]``, sorted
    ascending.  Safe for concurrent reads.
    """

    __slots__ = ("indptr", "indices", "node_count", "edge_count")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        self.indptr = indptr
        self.indices = indices
        self.node_count = int(len(indptr) - 1)
        self.edge_count = int(len(indices) // 2)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from (u, v) pairs; self-loops and duplicates are dropped."""
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= node_count):
            raise ValueError("edge endpoint out of range")
        indptr, indices = _build_csr(node_count, arr)
        return cls(indptr, indices)

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of node i (read-only view)."""
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        k = int(np.searchsorted(row, v))
        return k < len(row) and row[k] == v

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each undirected edge once, as (u, v) with u < v, sorted."""
        for u in range(self.node_count):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) array with u < v, lexicographically sorted."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        mask = src < self.indices
        return np.column_stack((src[mask], self.indices[mask]))

    def dense_adjacency(self, dtype=np.uint8) -> np.ndarray:
        """Dense adjacency matrix; O(n^2) memory, meant for desk-scale graphs."""
        a = np.zeros((self.node_count, self.node_count), dtype=dtype)
        if self.edge_count:
            e = self.edge_array()
            a[e[:, 0], e[:, 1]] = 1
            a[e[:, 1], e[:, 0]] = 1
        return a

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.node_count == other.node_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):  # pragma: no cover - identity hashing only
        return id(self)

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def _build_csr(n: int, arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonicalize an edge array into sorted, deduplicated CSR arrays."""
    if arr.size == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32)
    arr = arr[arr[:, 0] != arr[:, 1]]
    if arr.size == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32)
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    keys = np.unique(lo * np.int64(n) + hi)
    lo, hi = keys // n, keys % n
    src = np.concatenate((lo, hi))
    dst = np.concatenate((hi, lo))
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int32)


class LabelMap:
    """Bidirectional map between external labels and dense internal ids."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: list[str]):
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}
        if len(self._index) != len(labels):
            raise ValueError("duplicate labels")

    @classmethod
    def identity(cls, n: int) -> "LabelMap":
        return cls([str(i) for i in range(n)])

    def id_of(self, label: str) -> int:
        return self._index[label]

    def label_of(self, i: int) -> str:
        return self.labels[i]

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index


@dataclass
class ParseReport:
    """Counts of silently dropped input: duplicate edges and self-loops."""

    duplicate_edges: int = 0
    self_loops: int = 0
    lines_read: int = 0


@dataclass
class ParseResult:
    graph: Graph
    labels: LabelMap
    report: ParseReport
    #: unique edges as (label_a, label_b) in first-occurrence orientation
    oriented_edges: list[tuple[str, str]] = field(default_factory=list)


def parse_edge_list(source: Iterable[str] | Iterable[bytes] | str) -> ParseResult:
    """Parse whitespace-separated edge-list text into a graph.

    Each non-comment line holds two node labels.  Lines starting with '#'
    or '%' and blank lines are skipped.  Duplicate edges and self-loops are
    dropped but counted in the report.  Labels are remapped to dense
    0-based ids in order of first appearance.
    """
    if isinstance(source, str):
        lines: Iterable = source.splitlines()
    else:
        lines = source
    labels: list[str] = []
    index: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    oriented: list[tuple[str, str]] = []
    report = ParseReport()

    def intern(tok: str) -> int:
        i = index.get(tok)
        if i is None:
            i = len(labels)
            index[tok] = i
            labels.append(tok)
        return i

    for lineno, raw in enumerate(lines, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        report.lines_read = lineno
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"expected 2 tokens, got {len(toks)}", lineno)
        a, b = intern(toks[0]), intern(toks[1])
        if a == b:
            report.self_loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            report.duplicate_edges += 1
            continue
        seen.add(key)
        edges.append((a, b))
        oriented.append((toks[0], toks[1]))

    if not labels:
        raise ParseError("empty graph: no nodes found")
    graph = Graph.from_edges(len(labels), edges)
    return ParseResult(graph, LabelMap(labels), report, oriented)


def load_edge_list(path: str | Path) -> ParseResult:
    with open(path, "rb") as fh:
        return parse_edge_list(fh)


def write_edge_list(target: IO[str] | str | Path, edges: Iterable[tuple[str, str]]) -> None:
    """Write labeled edges one per line, preserving the given orientation."""
    if isinstance(target, (str, Path)):
        with open(target, "w") as fh:
            write_edge_list(fh, edges)
        return
    for a, b in edges:
        target.write(f"{a} {b}\n")


def graph_edge_labels(g: Graph, labels: LabelMap | None = None) -> Iterator[tuple[str, str]]:
    """Edges of g as label pairs (u < v order); identity labels if none given."""
    if labels is None:
        labels = LabelMap.identity(g.node_count)
    for u, v in g.edges():
        yield labels.label_of(u), labels.label_of(v)


def eccentricities(g: Graph) -> np.ndarray:
    """Per-node eccentricity within the node's connected component (BFS)."""
    if g.node_count == 0:
        raise ValueError("empty graph")
    return _kernels.eccentricity_kernel(g.indptr, g.indices, g.node_count)


def diameter(g: Graph) -> int:
    """Largest component eccentricity; at least 1 so iteration budgets stay positive."""
    return max(int(eccentricities(g).max()), 1)


@dataclass
class SubgraphResult:
    graph: Graph
    #: original id of each subgraph node (ascending original order)
    to_original: np.ndarray
    #: subgraph id for each original node, -1 where dropped
    to_subgraph: np.ndarray


def induced_subgraph(g: Graph, keep: Iterable[int]) -> SubgraphResult:
    """Subgraph on `keep`, retaining exactly edges with both endpoints kept."""
    keep_ids = np.unique(np.fromiter(keep, dtype=np.int64))
    if keep_ids.size == 0:
        raise ValueError("keep set is empty")
    if keep_ids[0] < 0 or keep_ids[-1] >= g.node_count:
        raise ValueError("keep contains node ids outside the graph")
    to_sub = np.full(g.node_count, -1, dtype=np.int64)
    to_sub[keep_ids] = np.arange(keep_ids.size)
    edges = []
    for u in keep_ids:
        su = to_sub[u]
        for v in g.neighbors(u):
            sv = to_sub[v]
            if sv > su:
                edges.append((su, sv))
    sub = Graph.from_edges(keep_ids.size, edges)
    return SubgraphResult(sub, keep_ids, to_sub)

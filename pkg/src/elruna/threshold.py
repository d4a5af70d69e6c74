"""Per-node visit fractions under breadth-first expansion.

Row i of the matrix tracks how much of the graph node i has seen after each
iteration; these fractions scale the contribution thresholds that gate
similarity accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph


@dataclass
class ThresholdMatrix:
    """Visit fractions: values[i, k-1] = |ball(i, k)| / n for k = 1..t_max.

    The distance-0 column is implicit and reads 1/n for every node.  Rows
    are non-decreasing and reach 1 at the node's eccentricity on connected
    graphs; on disconnected graphs they plateau at the component fraction.
    """

    values: np.ndarray
    t_max: int

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    def value(self, i: int, k: int) -> float:
        if k == 0:
            return 1.0 / self.node_count
        return float(self.values[i, k - 1])

    def column(self, k: int) -> np.ndarray:
        """Visit fractions of all nodes after k iterations (k = 0 gives 1/n)."""
        if k == 0:
            return np.full(self.node_count, 1.0 / self.node_count)
        if k > self.t_max:
            raise IndexError(f"column {k} beyond t_max={self.t_max}")
        return self.values[:, k - 1]


def compute_thresholds(g: Graph, t_max: int) -> ThresholdMatrix:
    """Frontier-expanding BFS from every node, t_max rounds."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    values = _kernels.threshold_kernel(g.indptr, g.indices, g.node_count, t_max)
    return ThresholdMatrix(values, t_max)

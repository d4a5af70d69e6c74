"""Alignment quality scores: conserved edges, EC, S3, and the QAP objective."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

from .alignment import Alignment
from .graph import Graph, induced_subgraph


def conserved_edges(a: Alignment, g1: Graph, g2: Graph) -> int:
    """Number of g1 edges whose endpoint images are adjacent in g2."""
    count = 0
    forward = a.forward
    for u, v in g1.edges():
        if g2.has_edge(int(forward[u]), int(forward[v])):
            count += 1
    return count


def edge_correctness(a: Alignment, g1: Graph, g2: Graph) -> float:
    """Conserved edges over |E1|."""
    if g1.edge_count == 0:
        raise ValueError("edge correctness undefined for an edgeless g1")
    return conserved_edges(a, g1, g2) / g1.edge_count


def s3_score(a: Alignment, g1: Graph, g2: Graph) -> float:
    """Conserved edges over the union of mapped and induced edge sets."""
    if g1.edge_count == 0:
        raise ValueError("S3 undefined for an edgeless g1")
    conserved = conserved_edges(a, g1, g2)
    induced = induced_subgraph(g2, a.forward).graph.edge_count
    denom = g1.edge_count + induced - conserved
    return conserved / denom if denom > 0 else 0.0


def qap_objective(a: Alignment, g1: Graph, g2: Graph) -> int:
    """-trace(P^T A P B^T), which for undirected graphs is -2x conserved edges."""
    return -2 * conserved_edges(a, g1, g2)


SCORECARD_FIELDS = [
    "instance",
    "method",
    "p",
    "seed",
    "conserved",
    "ec",
    "s3",
    "objective",
    "wall_ms",
    "iterations",
]


@dataclass
class Scorecard:
    """One alignment run's scores plus the context needed to re-run it."""

    instance: str
    method: str
    p: float | None
    seed: int
    conserved: int
    ec: float
    s3: float
    objective: int
    wall_ms: float
    iterations: int
    #: fraction of g1 nodes mapped to their ground-truth image (bench runs only)
    gt_accuracy: float | None = None

    @classmethod
    def evaluate(
        cls,
        a: Alignment,
        g1: Graph,
        g2: Graph,
        *,
        instance: str,
        method: str,
        p: float | None,
        seed: int,
        wall_ms: float,
        iterations: int,
    ) -> "Scorecard":
        conserved = conserved_edges(a, g1, g2)
        return cls(
            instance=instance,
            method=method,
            p=p,
            seed=seed,
            conserved=conserved,
            ec=conserved / g1.edge_count if g1.edge_count else 0.0,
            s3=s3_score(a, g1, g2) if g1.edge_count else 0.0,
            objective=-2 * conserved,
            wall_ms=wall_ms,
            iterations=iterations,
        )

    def row(self, with_accuracy: bool = False) -> list[str]:
        vals = [
            self.instance,
            self.method,
            "" if self.p is None else f"{self.p:.6g}",
            str(self.seed),
            str(self.conserved),
            f"{self.ec:.6f}",
            f"{self.s3:.6f}",
            str(self.objective),
            f"{self.wall_ms:.3f}",
            str(self.iterations),
        ]
        if with_accuracy:
            vals.append("" if self.gt_accuracy is None else f"{self.gt_accuracy:.6f}")
        return vals


def write_scorecards(
    fh: IO[str], cards: list[Scorecard], with_accuracy: bool = False
) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    header = SCORECARD_FIELDS + (["gt_accuracy"] if with_accuracy else [])
    writer.writerow(header)
    for card in cards:
        writer.writerow(card.row(with_accuracy))

"""Partition evaluation: NMI, granularity, label partitions and h-index."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import normalized_mutual_info_score

from .graph import ContractViolation
from .leiden import Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelRecord:
    node: str
    label: str
    confidence: float


@dataclass(frozen=True)
class LabelSet:
    records: Tuple[LabelRecord, ...]

    def __post_init__(self) -> None:
        seen = set()
        for rec in self.records:
            if not 0.0 <= rec.confidence <= 1.0:
                raise ValueError(f"confidence for {rec.node!r}/{rec.label!r} must be within [0, 1]")
            key = (rec.node, rec.label)
            if key in seen:
                raise ValueError(f"duplicate label {rec.label!r} for node {rec.node!r}")
            seen.add(key)

    @classmethod
    def from_triples(cls, triples: Iterable[Tuple[str, str, float]]) -> "LabelSet":
        return cls(tuple(LabelRecord(str(n), str(l), float(c)) for n, l, c in triples))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "node": [r.node for r in self.records],
                "label": [r.label for r in self.records],
                "confidence": [r.confidence for r in self.records],
            },
            columns=["node", "label", "confidence"],
        )


@dataclass(frozen=True)
class NmiComparison:
    value: float
    shared_nodes: int
    dropped_left: int
    dropped_right: int
    degenerate: bool

    @property
    def dropped_nodes(self) -> int:
        return self.dropped_left + self.dropped_right


def _dense(labels: Sequence[int]) -> List[int]:
    seen: dict = {}
    return [seen.setdefault(x, len(seen)) for x in labels]


def compare_partitions(p: Partition, q: Partition) -> NmiComparison:
    """NMI = 2 I(P;Q) / (H(P) + H(Q)) on the nodes both partitions cover."""
    q_index = q.index
    shared = sorted(ext for ext in p.ids if ext in q_index)
    if not shared:
        raise ContractViolation("partitions share no nodes")
    dropped_left = p.node_count - len(shared)
    dropped_right = q.node_count - len(shared)
    if dropped_left or dropped_right:
        logger.info("nmi: %d shared nodes, dropped %d left-only and %d right-only", len(shared), dropped_left, dropped_right)

    p_index = p.index
    a = _dense([int(p.membership[p_index[x]]) for x in shared])
    b = _dense([int(q.membership[q_index[x]]) for x in shared])
    if max(a) == 0 and max(b) == 0:
        return NmiComparison(1.0, len(shared), dropped_left, dropped_right, True)
    first, second = (a, b) if a <= b else (b, a)
    value = float(normalized_mutual_info_score(first, second, average_method="arithmetic"))
    value = min(1.0, max(0.0, value))
    return NmiComparison(value, len(shared), dropped_left, dropped_right, False)


def nmi(p: Partition, q: Partition) -> float:
    return compare_partitions(p, q).value


def granularity(p: Partition) -> float:
    """G = N / sum_a S_a^2."""
    if p.node_count == 0:
        raise ValueError("granularity of an empty partition is undefined")
    sizes = p.cluster_sizes().astype(np.int64)
    return p.node_count / float(np.sum(sizes * sizes))


def label_partition(labels: LabelSet, nodes: Iterable[str]) -> Partition:
    """Assign each node its most confident label; ties go to the smallest label string."""
    wanted = sorted(set(nodes))
    frame = labels.to_frame()
    frame = frame[frame["node"].isin(wanted)]
    winners = (
        frame.sort_values(["node", "confidence", "label"], ascending=[True, False, True], kind="mergesort")
        .drop_duplicates("node", keep="first")
        .set_index("node")["label"]
    )
    covered = [x for x in wanted if x in winners.index]
    excluded = len(wanted) - len(covered)
    if excluded:
        logger.warning("label partition: %d node(s) without a label excluded", excluded)
    return Partition.from_labels(covered, [winners[x] for x in covered])


def h_index(citation_counts: Sequence[int]) -> int:
    counts = np.asarray(list(citation_counts), dtype=np.int64)
    if counts.size == 0:
        return 0
    if np.any(counts < 0):
        raise ValueError("citation counts must be non-negative")
    ranked = np.sort(counts)[::-1]
    return int(np.count_nonzero(ranked >= np.arange(1, ranked.size + 1)))


def nmi_vs_granularity_curve(runs: Sequence[Tuple[Partition, Partition]]) -> List[Tuple[float, float]]:
    if not runs:
        raise ValueError("runs must be non-empty")
    points = [(granularity(p), nmi(p, reference)) for p, reference in runs]
    return sorted(points, key=lambda pt: pt[0])

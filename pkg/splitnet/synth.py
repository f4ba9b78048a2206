"""Synthetic citation graphs: planted topical groups and random citation DAGs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .constants import BENCH_MEAN_REFERENCES
from .graph import CitationGraph
from .metrics import LabelSet
from .validate import raise_on_errors

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantedParams:
    groups: int = 4
    group_size: int = 32
    p_in: float = 0.3
    p_out: float = 0.02

    @property
    def node_count(self) -> int:
        return self.groups * self.group_size


def validate_planted(params: PlantedParams) -> List[str]:
    errors: List[str] = []

    def err(msg: str) -> None:
        errors.append(msg)

    if isinstance(params.groups, bool) or not isinstance(params.groups, int) or params.groups < 1:
        err("groups must be an integer >= 1")
    if isinstance(params.group_size, bool) or not isinstance(params.group_size, int) or params.group_size < 1:
        err("group_size must be an integer >= 1")
    for name in ("p_in", "p_out"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            err(f"{name} must be a probability in [0, 1]")
    return errors


def _node_ids(n: int) -> Tuple[str, ...]:
    width = len(str(max(n - 1, 0)))
    return tuple(f"n{i:0{width}d}" for i in range(n))


def planted_partition(params: PlantedParams, seed: int) -> Tuple[CitationGraph, LabelSet]:
    """Draw every unordered pair once, then orient each edge by a fair coin."""
    raise_on_errors(validate_planted(params))
    n = params.node_count
    ids = _node_ids(n)
    group = np.repeat(np.arange(params.groups), params.group_size)
    rng = np.random.default_rng(seed)

    rows, cols = np.triu_indices(n, k=1)
    prob = np.where(group[rows] == group[cols], params.p_in, params.p_out)
    hit = rng.random(rows.size) < prob
    rows, cols = rows[hit], cols[hit]
    flip = rng.random(rows.size) < 0.5
    src = np.where(flip, cols, rows)
    dst = np.where(flip, rows, cols)

    g = CitationGraph.from_indices(ids, src, dst)
    labels = LabelSet.from_triples((ids[i], f"g{group[i]}", 1.0) for i in range(n))
    logger.info(
        "planted partition: %d groups x %d nodes, %d citations (seed=%d)",
        params.groups,
        params.group_size,
        g.edge_count,
        seed,
    )
    return g, labels


def expected_edge_count(params: PlantedParams) -> Tuple[float, float]:
    """Mean and standard deviation of the planted edge count."""
    within = params.groups * params.group_size * (params.group_size - 1) // 2
    total = params.node_count * (params.node_count - 1) // 2
    across = total - within
    mean = within * params.p_in + across * params.p_out
    var = within * params.p_in * (1 - params.p_in) + across * params.p_out * (1 - params.p_out)
    return mean, math.sqrt(var)


def random_citation_dag(
    n_edges: int, rng: np.random.Generator, mean_references: int = BENCH_MEAN_REFERENCES
) -> CitationGraph:
    """`n_edges` distinct citations, each from a newer paper to an older one."""
    if n_edges < 1:
        raise ValueError("n_edges must be >= 1")
    if mean_references < 1:
        raise ValueError("mean_references must be >= 1")
    n = max(2, n_edges // mean_references)
    if n * (n - 1) // 2 < n_edges:
        n = int(math.ceil((1 + math.sqrt(1 + 8 * n_edges)) / 2))

    keys = np.zeros(0, dtype=np.int64)
    while keys.size < n_edges:
        draw = n_edges - keys.size + n_edges // 10 + 16
        citing = rng.integers(1, n, size=draw)
        cited = (rng.random(draw) * citing).astype(np.int64)
        merged = np.concatenate([keys, citing * n + cited])
        _, first = np.unique(merged, return_index=True)
        keys = merged[np.sort(first)]
    keys = keys[:n_edges]
    return CitationGraph.from_indices(_node_ids(n), keys // n, keys % n)

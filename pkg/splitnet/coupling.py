"""Bibliographic coupling and co-citation relatedness networks."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import sparse

from .constants import COUPLING_METHODS, DEFAULT_TOP_M
from .graph import CitationGraph, WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CouplingConfig:
    measure: str
    top_m: int = DEFAULT_TOP_M
    normalize: bool = True

    def __post_init__(self) -> None:
        if self.measure not in COUPLING_METHODS:
            raise ValueError(f"coupling measure must be BC or CC, got {self.measure!r}")
        if isinstance(self.top_m, bool) or not isinstance(self.top_m, int) or self.top_m < 1:
            raise ValueError("top_m must be an integer >= 1")


def _shared_neighbor_graph(a: sparse.csr_matrix, ids: Tuple[str, ...]) -> WeightedGraph:
    # Off-diagonal entries of a @ a.T count shared row neighbors.
    product = sparse.triu(a @ a.T, k=1).tocoo()
    mask = product.data > 0
    graph = WeightedGraph.from_arrays(
        ids,
        product.row[mask],
        product.col[mask],
        product.data[mask].astype(np.int64),
    )
    return graph.without_isolated()


def bibliographic_coupling(g: CitationGraph) -> WeightedGraph:
    """Weight(i, j) = number of references i and j share, i.e. (A A^T)_ij."""
    return _shared_neighbor_graph(g.adjacency, g.ids)


def co_citation(g: CitationGraph) -> WeightedGraph:
    """Weight(i, j) = number of items citing both i and j, i.e. (A^T A)_ij."""
    return _shared_neighbor_graph(g.adjacency.T.tocsr(), g.ids)


def couple(g: CitationGraph, measure: str) -> WeightedGraph:
    if measure == "BC":
        return bibliographic_coupling(g)
    if measure == "CC":
        return co_citation(g)
    raise ValueError(f"coupling measure must be BC or CC, got {measure!r}")


def top_m_filter(wg: WeightedGraph, m: int) -> WeightedGraph:
    """Keep an edge when it ranks in the m strongest edges of either endpoint.

    Ranking is by weight descending, then partner index ascending.
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValueError("m must be an integer >= 1")
    e = wg.edge_count
    if e == 0:
        return wg.without_isolated()
    edge_ids = np.arange(e)
    owner = np.concatenate([wg.rows, wg.cols])
    partner = np.concatenate([wg.cols, wg.rows])
    weight = np.concatenate([wg.weights, wg.weights])
    eid = np.concatenate([edge_ids, edge_ids])

    order = np.lexsort((partner, -weight, owner))
    owner_sorted = owner[order]
    starts = np.searchsorted(owner_sorted, owner_sorted, side="left")
    rank = np.arange(order.size) - starts

    keep = np.zeros(e, dtype=bool)
    keep[eid[order][rank < m]] = True
    filtered = WeightedGraph(wg.ids, wg.rows[keep], wg.cols[keep], wg.weights[keep])
    logger.debug("top-%d filter kept %d of %d edges", m, int(keep.sum()), e)
    return filtered.without_isolated()


def directed_relatedness(wg: WeightedGraph) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-endpoint normalized values r_ij / sum_k r_ik, both directions of every edge."""
    strength = wg.node_strength
    w = wg.weights.astype(np.float64)
    src = np.concatenate([wg.rows, wg.cols])
    dst = np.concatenate([wg.cols, wg.rows])
    values = np.concatenate([w / strength[wg.rows], w / strength[wg.cols]])
    return src, dst, values


def normalize_relatedness(wg: WeightedGraph) -> WeightedGraph:
    """Relatedness normalized by each paper's total, symmetrized by arithmetic mean."""
    if wg.edge_count == 0:
        return wg.with_weights(wg.weights.astype(np.float64))
    strength = wg.node_strength
    w = wg.weights.astype(np.float64)
    stored = (w / strength[wg.rows] + w / strength[wg.cols]) / 2.0
    return wg.with_weights(stored)

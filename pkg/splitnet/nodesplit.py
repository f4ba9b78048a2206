"""Node-split transformation of a citation graph into a citing/cited bipartite graph.

Every paper is duplicated into a citing copy (suffix ``:o``) and a cited copy
(suffix ``:i``). A citation u -> v becomes the undirected edge (u:o, v:i). Copies
without edges are never created, so the split graph has no dangling nodes.

Clustering the split graph and projecting the result onto one layer gives the
citing-layer clusters (BBCC under OutNorm) and cited-layer clusters (BFCC under
InNorm).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from .constants import CITED_SUFFIX, CITING_SUFFIX
from .graph import CitationGraph, ContractViolation, NodeId, WeightedGraph, giant_component_mask
from .leiden import Partition

logger = logging.getLogger(__name__)


class Layer(str, Enum):
    CITING = "citing"
    CITED = "cited"

    @property
    def suffix(self) -> str:
        return CITING_SUFFIX if self is Layer.CITING else CITED_SUFFIX


class NormalizationMode(str, Enum):
    RAW = "raw"
    OUT = "outnorm"
    IN = "innorm"
    BI = "binorm"

    @classmethod
    def parse(cls, value: "str | NormalizationMode") -> "NormalizationMode":
        if isinstance(value, NormalizationMode):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as exc:
            allowed = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown split normalization {value!r} (expected one of {allowed})") from exc


class SplitNodeId(NamedTuple):
    origin: NodeId
    layer: Layer

    @property
    def external_id(self) -> str:
        return self.origin.external_id + self.layer.suffix


@dataclass
class SplitCounter:
    """Counts traversals of the citation list made by `split`."""

    passes: int = 0
    edges_visited: int = 0


def method_tag(mode: NormalizationMode, layer: Layer) -> str:
    if mode is NormalizationMode.OUT and layer is Layer.CITING:
        return "BBCC"
    if mode is NormalizationMode.IN and layer is Layer.CITED:
        return "BFCC"
    return f"Split-{mode.value}-{layer.value}"


@dataclass(frozen=True, eq=False)
class SplitGraph:
    """Bipartite graph of citing and cited copies.

    Citing node k is the copy of origin `citing_origin[k]`; cited node k the copy
    of `cited_origin[k]`. Edge e joins citing node `citing[e]` to cited node
    `cited[e]` with weight `weights[e]`.
    """

    origin_ids: Tuple[str, ...]
    citing_origin: np.ndarray
    cited_origin: np.ndarray
    citing: np.ndarray
    cited: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[str, str, float]]) -> "SplitGraph":
        """Build from (citing origin id, cited origin id, weight) triples."""
        triples = list(edges)
        origin_ids = sorted({a for a, _, _ in triples} | {b for _, b, _ in triples})
        index = {ext: i for i, ext in enumerate(origin_ids)}
        src = np.array([index[a] for a, _, _ in triples], dtype=np.int64)
        dst = np.array([index[b] for _, b, _ in triples], dtype=np.int64)
        weights = np.array([w for _, _, w in triples])
        if weights.size == 0:
            weights = np.zeros(0, dtype=np.int64)
        order = np.lexsort((dst, src))
        src, dst, weights = src[order], dst[order], weights[order]
        if src.size and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
            raise ValueError("split graph edges must be unique")
        citing_origin, citing = np.unique(src, return_inverse=True)
        cited_origin, cited = np.unique(dst, return_inverse=True)
        return cls(
            tuple(origin_ids),
            citing_origin.astype(np.int64),
            cited_origin.astype(np.int64),
            citing.reshape(-1).astype(np.int64),
            cited.reshape(-1).astype(np.int64),
            weights,
        )

    @property
    def citing_count(self) -> int:
        return int(self.citing_origin.size)

    @property
    def cited_count(self) -> int:
        return int(self.cited_origin.size)

    @property
    def node_count(self) -> int:
        return self.citing_count + self.cited_count

    @property
    def edge_count(self) -> int:
        return int(self.citing.size)

    def _origin(self, index: int) -> NodeId:
        return NodeId(int(index), self.origin_ids[int(index)])

    @property
    def citing_nodes(self) -> List[SplitNodeId]:
        return [SplitNodeId(self._origin(i), Layer.CITING) for i in self.citing_origin]

    @property
    def cited_nodes(self) -> List[SplitNodeId]:
        return [SplitNodeId(self._origin(i), Layer.CITED) for i in self.cited_origin]

    @property
    def provenance(self) -> Dict[SplitNodeId, NodeId]:
        return {node: node.origin for node in self.citing_nodes + self.cited_nodes}

    @property
    def external_ids(self) -> Tuple[str, ...]:
        """Citing copies first, then cited copies; matches `to_weighted` indices."""
        return tuple(n.external_id for n in self.citing_nodes) + tuple(n.external_id for n in self.cited_nodes)

    def layer_nodes(self, layer: Layer) -> List[SplitNodeId]:
        return self.citing_nodes if layer is Layer.CITING else self.cited_nodes

    @property
    def citing_strength(self) -> np.ndarray:
        return np.bincount(self.citing, weights=self.weights.astype(np.float64), minlength=self.citing_count)

    @property
    def cited_strength(self) -> np.ndarray:
        return np.bincount(self.cited, weights=self.weights.astype(np.float64), minlength=self.cited_count)

    def to_weighted(self) -> WeightedGraph:
        # Citing indices precede cited indices, so every edge already has u < v.
        return WeightedGraph(
            self.external_ids,
            self.citing.copy(),
            self.cited + self.citing_count,
            self.weights,
        )

    def with_weights(self, weights: np.ndarray) -> "SplitGraph":
        if weights.shape != self.weights.shape:
            raise ValueError("weight array does not match edge count")
        return SplitGraph(
            self.origin_ids, self.citing_origin, self.cited_origin, self.citing, self.cited, weights
        )

    def restrict(self, keep_citing: np.ndarray, keep_cited: np.ndarray) -> "SplitGraph":
        keep_citing = np.asarray(keep_citing, dtype=bool)
        keep_cited = np.asarray(keep_cited, dtype=bool)
        emask = keep_citing[self.citing] & keep_cited[self.cited]
        citing_pos = np.cumsum(keep_citing) - 1
        cited_pos = np.cumsum(keep_cited) - 1
        restricted = SplitGraph(
            self.origin_ids,
            self.citing_origin[keep_citing],
            self.cited_origin[keep_cited],
            citing_pos[self.citing[emask]],
            cited_pos[self.cited[emask]],
            self.weights[emask],
        )
        return restricted.drop_dangling()

    def drop_dangling(self) -> "SplitGraph":
        live_citing = np.bincount(self.citing, minlength=self.citing_count) > 0
        live_cited = np.bincount(self.cited, minlength=self.cited_count) > 0
        if live_citing.all() and live_cited.all():
            return self
        return self.restrict(live_citing, live_cited)

    def check(self) -> None:
        """Raise ContractViolation unless the graph is bipartite and dangling-free."""
        if self.citing.shape != self.cited.shape or self.citing.shape != self.weights.shape:
            raise ContractViolation("split graph edge arrays differ in length")
        if self.edge_count:
            if self.citing.min() < 0 or self.citing.max() >= self.citing_count:
                raise ContractViolation("split edge endpoint outside the citing layer")
            if self.cited.min() < 0 or self.cited.max() >= self.cited_count:
                raise ContractViolation("split edge endpoint outside the cited layer")
        if np.any(np.bincount(self.citing, minlength=self.citing_count) == 0):
            raise ContractViolation("split graph holds a dangling citing node")
        if np.any(np.bincount(self.cited, minlength=self.cited_count) == 0):
            raise ContractViolation("split graph holds a dangling cited node")
        if self.weights.size and not np.all(self.weights > 0):
            raise ContractViolation("split edge weights must be strictly positive")


def split(g: CitationGraph, counter: Optional[SplitCounter] = None) -> SplitGraph:
    """Duplicate each node into citing/cited copies in one pass over the citations."""
    n = g.node_count
    has_out = np.zeros(n, dtype=bool)
    has_in = np.zeros(n, dtype=bool)
    has_out[g.src] = True
    has_in[g.dst] = True
    citing_pos = np.cumsum(has_out, dtype=np.int64) - 1
    cited_pos = np.cumsum(has_in, dtype=np.int64) - 1
    citing = citing_pos[g.src]
    cited = cited_pos[g.dst]
    if counter is not None:
        counter.passes += 1
        counter.edges_visited += g.edge_count
    sg = SplitGraph(
        g.ids,
        np.flatnonzero(has_out).astype(np.int64),
        np.flatnonzero(has_in).astype(np.int64),
        citing,
        cited,
        np.ones(g.edge_count, dtype=np.int64),
    )
    logger.debug(
        "split: %d nodes -> %d citing + %d cited, %d edges",
        n,
        sg.citing_count,
        sg.cited_count,
        sg.edge_count,
    )
    return sg


def normalize_split(sg: SplitGraph, mode: "NormalizationMode | str") -> SplitGraph:
    mode = NormalizationMode.parse(mode)
    if mode is NormalizationMode.RAW:
        return sg
    w = sg.weights.astype(np.float64)
    if mode is NormalizationMode.OUT:
        return sg.with_weights(w / sg.citing_strength[sg.citing])
    if mode is NormalizationMode.IN:
        return sg.with_weights(w / sg.cited_strength[sg.cited])
    return sg.with_weights(w / np.sqrt(sg.citing_strength[sg.citing] * sg.cited_strength[sg.cited]))


def split_giant_component(sg: SplitGraph) -> SplitGraph:
    wg = sg.to_weighted()
    mask = giant_component_mask(wg.node_count, wg.rows, wg.cols)
    return sg.restrict(mask[: sg.citing_count], mask[sg.citing_count :])


def project_layer(p: Partition, sg: SplitGraph, layer: "Layer | str") -> Partition:
    """Restrict a joint partition to one layer, re-keyed by origin id."""
    layer = Layer(layer)
    nodes = sg.layer_nodes(layer)
    index = p.index
    labels: List[int] = []
    for node in nodes:
        pos = index.get(node.external_id)
        if pos is None:
            raise ContractViolation(f"partition does not assign split node {node.external_id!r}")
        labels.append(int(p.membership[pos]))
    return Partition.from_labels([node.origin.external_id for node in nodes], labels)

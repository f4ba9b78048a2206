"""Citation graph model: ingestion, isolated-node removal, symmetrization and GCC."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import BinaryIO, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .constants import RESERVED_SUFFIXES

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Raised when an input file cannot be parsed."""


class ContractViolation(RuntimeError):
    """Raised when a structural invariant of a graph, partition or run is broken."""


class NodeId(NamedTuple):
    intern_index: int
    external_id: str


@dataclass(frozen=True)
class IngestOptions:
    allow_list: Optional[FrozenSet[str]] = None
    source_name: str = "<stream>"


@dataclass(frozen=True)
class IngestStats:
    lines: int = 0
    self_loops: int = 0
    duplicates: int = 0
    outside_allow_list: int = 0


@dataclass(frozen=True)
class StatsReport:
    nodes: int
    edges: int
    citing_nodes: int
    cited_nodes: int
    isolated: int


def _as_index(values: Union[Sequence[int], np.ndarray]) -> np.ndarray:
    return np.asarray(values, dtype=np.int64).reshape(-1)


def _densify(keep: np.ndarray) -> np.ndarray:
    return np.cumsum(keep, dtype=np.int64) - 1


@dataclass(frozen=True, eq=False)
class CitationGraph:
    """Directed citation graph over interned ids.

    `ids` is sorted, so intern indices follow external-id order. `src`/`dst` hold
    one entry per citation, sorted by (src, dst), without self-loops or duplicates.
    """

    ids: Tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    stats: Optional[IngestStats] = None

    @classmethod
    def from_indices(
        cls,
        ids: Sequence[str],
        src: Union[Sequence[int], np.ndarray],
        dst: Union[Sequence[int], np.ndarray],
        stats: Optional[IngestStats] = None,
    ) -> "CitationGraph":
        n = len(ids)
        src = _as_index(src)
        dst = _as_index(dst)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if src.size:
            keys = np.unique(src * n + dst)
            src, dst = keys // n, keys % n
        return cls(tuple(ids), src, dst, stats)

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Tuple[str, str]],
        nodes: Iterable[str] = (),
        stats: Optional[IngestStats] = None,
    ) -> "CitationGraph":
        pairs = list(edges)
        ids = sorted(set(nodes).union(*pairs))
        index = {ext: i for i, ext in enumerate(ids)}
        src = [index[a] for a, _ in pairs]
        dst = [index[b] for _, b in pairs]
        return cls.from_indices(ids, src, dst, stats)

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {ext: i for i, ext in enumerate(self.ids)}

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.node_count)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.node_count)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """A with A[i, j] = 1 iff i cites j."""
        n = self.node_count
        data = np.ones(self.edge_count, dtype=np.int64)
        matrix = sparse.csr_matrix((data, (self.src, self.dst)), shape=(n, n), dtype=np.int64)
        matrix.sort_indices()
        return matrix

    @cached_property
    def _transpose(self) -> sparse.csr_matrix:
        matrix = self.adjacency.T.tocsr()
        matrix.sort_indices()
        return matrix

    def out_neighbors(self, u: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[u] : a.indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        t = self._transpose
        return t.indices[t.indptr[u] : t.indptr[u + 1]]

    @property
    def out_adjacency(self) -> List[Tuple[int, ...]]:
        return [tuple(self.out_neighbors(u).tolist()) for u in range(self.node_count)]

    @property
    def in_adjacency(self) -> List[Tuple[int, ...]]:
        return [tuple(self.in_neighbors(u).tolist()) for u in range(self.node_count)]

    def reversed(self) -> "CitationGraph":
        return CitationGraph.from_indices(self.ids, self.dst, self.src)

    def induced(self, keep: np.ndarray) -> "CitationGraph":
        keep = np.asarray(keep, dtype=bool)
        new_index = _densify(keep)
        emask = keep[self.src] & keep[self.dst]
        ids = tuple(ext for ext, k in zip(self.ids, keep) if k)
        return CitationGraph(ids, new_index[self.src[emask]], new_index[self.dst[emask]], self.stats)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected weighted graph; every edge stored once with rows < cols."""

    ids: Tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_arrays(
        cls,
        ids: Sequence[str],
        rows: Union[Sequence[int], np.ndarray],
        cols: Union[Sequence[int], np.ndarray],
        weights: Union[Sequence[float], np.ndarray],
    ) -> "WeightedGraph":
        """Canonicalize an edge array: orient u < v, sum duplicate pairs, sort."""
        n = len(ids)
        rows = _as_index(rows)
        cols = _as_index(cols)
        weights = np.asarray(weights).reshape(-1)
        if not (rows.shape == cols.shape == weights.shape):
            raise ValueError("rows, cols and weights must have the same length")
        if np.any(rows == cols):
            raise ValueError("weighted graphs cannot hold self-loops")
        if weights.size and not np.all(weights > 0):
            raise ValueError("edge weights must be strictly positive")
        integral = weights.size == 0 or np.issubdtype(weights.dtype, np.integer)
        u = np.minimum(rows, cols)
        v = np.maximum(rows, cols)
        if u.size:
            keys, inverse = np.unique(u * n + v, return_inverse=True)
            summed = np.bincount(inverse.reshape(-1), weights=weights, minlength=keys.size)
            u, v = keys // n, keys % n
            weights = summed.astype(np.int64) if integral else summed
        else:
            weights = np.zeros(0, dtype=np.int64 if integral else np.float64)
        return cls(tuple(ids), u, v, weights)

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return int(self.rows.size)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {ext: i for i, ext in enumerate(self.ids)}

    @cached_property
    def node_strength(self) -> np.ndarray:
        n = self.node_count
        w = self.weights.astype(np.float64)
        return np.bincount(self.rows, weights=w, minlength=n) + np.bincount(self.cols, weights=w, minlength=n)

    @cached_property
    def degree(self) -> np.ndarray:
        n = self.node_count
        return np.bincount(self.rows, minlength=n) + np.bincount(self.cols, minlength=n)

    @property
    def total_weight(self) -> float:
        """2m: the sum of node strengths."""
        return float(self.node_strength.sum())

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        n = self.node_count
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        w = np.concatenate([self.weights, self.weights]).astype(np.float64)
        matrix = sparse.csr_matrix((w, (r, c)), shape=(n, n))
        matrix.sort_indices()
        return matrix

    def neighbor_lists(self) -> Tuple[List[List[int]], List[List[float]]]:
        a = self.adjacency
        indptr = a.indptr.tolist()
        indices = a.indices.tolist()
        data = a.data.tolist()
        nbrs = [indices[indptr[i] : indptr[i + 1]] for i in range(self.node_count)]
        wts = [data[indptr[i] : indptr[i + 1]] for i in range(self.node_count)]
        return nbrs, wts

    def edge_list(self) -> List[Tuple[int, int, float]]:
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()))

    def weight(self, u: int, v: int) -> float:
        return float(self.adjacency[u, v])

    def induced(self, keep: np.ndarray) -> "WeightedGraph":
        keep = np.asarray(keep, dtype=bool)
        new_index = _densify(keep)
        emask = keep[self.rows] & keep[self.cols]
        ids = tuple(ext for ext, k in zip(self.ids, keep) if k)
        return WeightedGraph(ids, new_index[self.rows[emask]], new_index[self.cols[emask]], self.weights[emask])

    def without_isolated(self) -> "WeightedGraph":
        return self.induced(self.degree > 0)

    def with_weights(self, weights: np.ndarray) -> "WeightedGraph":
        if weights.shape != self.weights.shape:
            raise ValueError("weight array does not match edge count")
        return WeightedGraph(self.ids, self.rows, self.cols, weights)


def load_edge_list(source: Union[BinaryIO, Iterable[bytes]], options: Optional[IngestOptions] = None) -> CitationGraph:
    """Parse `citing<TAB>cited` lines into a canonical CitationGraph."""
    opts = options or IngestOptions()
    allow = opts.allow_list
    name = opts.source_name
    pairs: List[Tuple[str, str]] = []
    loop_nodes: set = set()
    lines = self_loops = outside = 0

    for lineno, raw in enumerate(source, start=1):
        lines = lineno
        try:
            line = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
        except UnicodeDecodeError as exc:
            raise ParseError(f"{name}:{lineno}: input is not valid UTF-8") from exc
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"{name}:{lineno}: expected 2 tab-separated fields, got {len(fields)}")
        citing, cited = fields[0].strip(), fields[1].strip()
        if not citing or not cited:
            raise ParseError(f"{name}:{lineno}: empty node id")
        for ext in (citing, cited):
            if ext.endswith(RESERVED_SUFFIXES):
                raise ParseError(f"{name}:{lineno}: node id {ext!r} ends with a reserved layer suffix")
        if allow is not None and (citing not in allow or cited not in allow):
            outside += 1
            continue
        if citing == cited:
            self_loops += 1
            loop_nodes.add(citing)
            continue
        pairs.append((citing, cited))

    unique = sorted(set(pairs))
    stats = IngestStats(
        lines=lines,
        self_loops=self_loops,
        duplicates=len(pairs) - len(unique),
        outside_allow_list=outside,
    )
    if self_loops or stats.duplicates or outside:
        logger.info(
            "ingest %s: dropped self_loops=%d duplicates=%d outside_allow_list=%d",
            name,
            self_loops,
            stats.duplicates,
            outside,
        )
    return CitationGraph.from_edges(unique, nodes=loop_nodes, stats=stats)


def remove_isolated(g: CitationGraph) -> CitationGraph:
    return g.induced((g.out_degree + g.in_degree) > 0)


def to_undirected(g: CitationGraph) -> WeightedGraph:
    """Reciprocal citations A->B, B->A sum to weight 2."""
    return WeightedGraph.from_arrays(g.ids, g.src, g.dst, np.ones(g.edge_count, dtype=np.int64))


def giant_component_mask(n: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Node mask of the largest component; ties go to the smallest minimum index."""
    if n == 0:
        return np.zeros(0, dtype=bool)
    matrix = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    count, labels = connected_components(matrix, directed=False)
    sizes = np.bincount(labels, minlength=count)
    _, first = np.unique(labels, return_index=True)
    best = np.lexsort((first, -sizes))[0]
    return labels == best


def giant_component(g: WeightedGraph) -> WeightedGraph:
    return g.induced(giant_component_mask(g.node_count, g.rows, g.cols))


def degree_stats(g: CitationGraph) -> StatsReport:
    out_deg = g.out_degree
    in_deg = g.in_degree
    return StatsReport(
        nodes=g.node_count,
        edges=g.edge_count,
        citing_nodes=int(np.count_nonzero(out_deg)),
        cited_nodes=int(np.count_nonzero(in_deg)),
        isolated=int(np.count_nonzero((out_deg + in_deg) == 0)),
    )

"""Leiden-style optimization of the RB Potts quality with configuration null model.

    Q = sum_ij (A_ij - gamma * k_i * k_j / 2m) * delta(sigma_i, sigma_j)

summed over ordered pairs including i == j, with 2m = sum_i k_i. Each run has
three phases per level (local moving, refinement, aggregation), followed by a
polishing pass on the input graph: local moving alternated with splitting of
disconnected clusters until neither changes anything. The result is therefore
single-node-move stable and every cluster is connected.

Runs are deterministic: nodes are processed in canonical external-id order and
the RNG is seeded from the user seed and a hash of the sorted id set, so
relabeling intern indices relabels the result and nothing else.
"""

from __future__ import annotations

import heapq
import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from itertools import repeat
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_MAX_ITERATIONS, DEFAULT_QUALITY_EPSILON, DEFAULT_SEED, MAX_SEED, REFINE_THETA
from .graph import ContractViolation, WeightedGraph
from .util import canonical_id_hash

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of external ids to dense cluster ids."""

    ids: Tuple[str, ...]
    membership: np.ndarray

    @classmethod
    def from_labels(cls, ids: Sequence[str], labels: Sequence[Hashable]) -> "Partition":
        """Densify arbitrary labels; cluster ids follow first appearance in `ids` order."""
        ids = tuple(ids)
        if len(ids) != len(labels):
            raise ValueError("ids and labels must have the same length")
        if len(set(ids)) != len(ids):
            raise ValueError("partition ids must be unique")
        dense: Dict[Hashable, int] = {}
        membership = np.fromiter(
            (dense.setdefault(label, len(dense)) for label in labels), dtype=np.int64, count=len(ids)
        )
        return cls(ids, membership)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Hashable]) -> "Partition":
        ids = sorted(mapping)
        return cls.from_labels(ids, [mapping[x] for x in ids])

    @classmethod
    def singletons(cls, ids: Sequence[str]) -> "Partition":
        return cls(tuple(ids), np.arange(len(ids), dtype=np.int64))

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def cluster_count(self) -> int:
        return int(self.membership.max()) + 1 if self.membership.size else 0

    @cached_property
    def index(self) -> Dict[str, int]:
        return {ext: i for i, ext in enumerate(self.ids)}

    def cluster_of(self, external_id: str) -> int:
        return int(self.membership[self.index[external_id]])

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.membership, minlength=self.cluster_count)

    def singleton_count(self) -> int:
        return int(np.count_nonzero(self.cluster_sizes() == 1))

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.ids, self.membership.tolist()))

    def restrict(self, ids: Iterable[str]) -> "Partition":
        """Sub-partition on `ids` (kept in this partition's order), re-densified."""
        wanted = set(ids)
        kept = [(ext, label) for ext, label in zip(self.ids, self.membership.tolist()) if ext in wanted]
        return Partition.from_labels([e for e, _ in kept], [l for _, l in kept])

    def clusters(self) -> List[List[str]]:
        groups: List[List[str]] = [[] for _ in range(self.cluster_count)]
        for ext, label in zip(self.ids, self.membership.tolist()):
            groups[label].append(ext)
        return groups

    def equals(self, other: "Partition") -> bool:
        return self.ids == other.ids and np.array_equal(self.membership, other.membership)


@dataclass(frozen=True, eq=False)
class QualityContext:
    gamma: float
    total_weight: float
    node_strength: np.ndarray

    @classmethod
    def from_graph(cls, g: WeightedGraph, gamma: float) -> "QualityContext":
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        strength = g.node_strength
        return cls(float(gamma), math.fsum(strength.tolist()), strength)


@dataclass(frozen=True)
class LeidenParams:
    seed: int = DEFAULT_SEED
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    quality_epsilon: float = DEFAULT_QUALITY_EPSILON
    # Recompute Q after every phase and raise if it drops.
    check_monotone: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.quality_epsilon > 0:
            raise ValueError("quality_epsilon must be > 0")


def _aligned_membership(g: WeightedGraph, p: Partition) -> np.ndarray:
    if p.ids == g.ids:
        return p.membership
    index = p.index
    missing = [ext for ext in g.ids if ext not in index]
    if missing:
        raise ContractViolation(f"partition does not cover {len(missing)} graph node(s), e.g. {missing[0]!r}")
    return np.array([p.membership[index[ext]] for ext in g.ids], dtype=np.int64)


def _quality(g: WeightedGraph, membership: np.ndarray, gamma: float, total_weight: float) -> float:
    same = membership[g.rows] == membership[g.cols]
    inner = 2.0 * math.fsum(g.weights[same].astype(np.float64).tolist())
    if total_weight == 0:
        return inner
    cluster_strength = np.bincount(membership, weights=g.node_strength)
    null = math.fsum((cluster_strength * cluster_strength).tolist())
    return inner - gamma * null / total_weight


def quality(g: WeightedGraph, p: Partition, ctx: Optional[QualityContext] = None) -> float:
    ctx = ctx or QualityContext.from_graph(g, 1.0)
    return _quality(g, _aligned_membership(g, p), ctx.gamma, ctx.total_weight)


class _Leiden:
    def __init__(self, g: WeightedGraph, gamma: float, params: LeidenParams, rng: np.random.Generator) -> None:
        self.g = g
        self.gamma = gamma
        self.params = params
        self.rng = rng
        self.eps = params.quality_epsilon
        self.two_m = g.total_weight
        self.scale = gamma / self.two_m if self.two_m > 0 else 0.0
        self.last_quality = -math.inf

    # ── Phases ────────────────────────────────────────────────────

    def move_nodes(
        self, nbrs: List[List[int]], wts: List[List[float]], k: List[float], comm: List[int]
    ) -> Tuple[List[int], bool]:
        n = len(k)
        comm = list(comm)
        cluster_k = [0.0] * n
        size = [0] * n
        for i, c in enumerate(comm):
            cluster_k[c] += k[i]
            size[c] += 1
        empty = [c for c in range(n) if size[c] == 0]
        heapq.heapify(empty)

        queue = deque(self.rng.permutation(n).tolist())
        queued = [True] * n
        changed = False
        while queue:
            i = queue.popleft()
            queued[i] = False
            a = comm[i]
            ki = k[i]
            w_to: Dict[int, float] = {}
            for j, w in zip(nbrs[i], wts[i]):
                c = comm[j]
                w_to[c] = w_to.get(c, 0.0) + w
            cluster_k[a] -= ki
            size[a] -= 1
            stay = w_to.get(a, 0.0) - self.scale * ki * cluster_k[a]

            best_c, best_gain = a, 0.0
            merge_c: Optional[int] = None
            for c in sorted(w_to):
                if c == a:
                    continue
                gain = 2.0 * (w_to[c] - self.scale * ki * cluster_k[c] - stay)
                if gain > best_gain:
                    best_c, best_gain = c, gain
                if merge_c is None and gain >= -self.eps:
                    merge_c = c
            if size[a] > 0 and empty:
                gain = -2.0 * stay
                if gain > best_gain:
                    best_c, best_gain = empty[0], gain

            if best_gain > self.eps:
                target = best_c
            elif size[a] == 0 and merge_c is not None:
                # zero-gain tie: merging a singleton lowers the cluster count
                target = merge_c
            else:
                target = a

            if target != a and size[target] == 0:
                heapq.heappop(empty)
            comm[i] = target
            cluster_k[target] += ki
            size[target] += 1
            if target != a:
                changed = True
                if size[a] == 0:
                    heapq.heappush(empty, a)
                for j in nbrs[i]:
                    if not queued[j] and comm[j] != target:
                        queue.append(j)
                        queued[j] = True
        return comm, changed

    def refine(self, nbrs: List[List[int]], wts: List[List[float]], k: List[float], comm: List[int]) -> List[int]:
        n = len(k)
        refined = list(range(n))
        r_k = list(k)
        r_size = [1] * n
        comm_k: Dict[int, float] = {}
        for i, c in enumerate(comm):
            comm_k[c] = comm_k.get(c, 0.0) + k[i]
        ext_w = [0.0] * n
        for i in range(n):
            ci = comm[i]
            ext_w[i] = sum(w for j, w in zip(nbrs[i], wts[i]) if comm[j] == ci)

        for i in self.rng.permutation(n).tolist():
            if refined[i] != i or r_size[i] != 1:
                continue
            c = comm[i]
            if ext_w[i] < self.scale * k[i] * (comm_k[c] - k[i]):
                continue
            w_to: Dict[int, float] = {}
            for j, w in zip(nbrs[i], wts[i]):
                if comm[j] == c:
                    r = refined[j]
                    w_to[r] = w_to.get(r, 0.0) + w
            targets: List[int] = [i]
            gains: List[float] = [0.0]
            for r in sorted(w_to):
                if r == i:
                    continue
                if ext_w[r] < self.scale * r_k[r] * (comm_k[c] - r_k[r]):
                    continue
                gain = 2.0 * (w_to[r] - self.scale * k[i] * r_k[r])
                if gain >= 0:
                    targets.append(r)
                    gains.append(gain)
            if len(targets) == 1:
                continue
            g = np.asarray(gains)
            prob = np.exp((g - g.max()) / REFINE_THETA)
            prob /= prob.sum()
            r = targets[int(self.rng.choice(len(targets), p=prob))]
            if r == i:
                continue
            ext_w[r] = ext_w[r] + ext_w[i] - 2.0 * w_to[r]
            r_k[r] += k[i]
            r_size[r] += 1
            r_size[i] -= 1
            refined[i] = r
        return refined

    @staticmethod
    def aggregate(
        nbrs: List[List[int]], wts: List[List[float]], k: List[float], refined: List[int], comm: List[int]
    ) -> Tuple[Tuple[List[List[int]], List[List[float]], List[float]], List[int], List[int]]:
        dense: Dict[int, int] = {}
        mapping = [dense.setdefault(r, len(dense)) for r in refined]
        size = len(dense)
        new_k = [0.0] * size
        acc: List[Dict[int, float]] = [dict() for _ in range(size)]
        for i in range(len(k)):
            ri = mapping[i]
            new_k[ri] += k[i]
            row = acc[ri]
            for j, w in zip(nbrs[i], wts[i]):
                rj = mapping[j]
                if rj != ri:
                    row[rj] = row.get(rj, 0.0) + w
        new_nbrs = [sorted(row) for row in acc]
        new_wts = [[acc[r][s] for s in new_nbrs[r]] for r in range(size)]
        comm_dense: Dict[int, int] = {}
        new_comm = [0] * size
        for i in range(len(k)):
            new_comm[mapping[i]] = comm_dense.setdefault(comm[i], len(comm_dense))
        return (new_nbrs, new_wts, new_k), new_comm, mapping

    @staticmethod
    def split_disconnected(nbrs: List[List[int]], memb: List[int]) -> Tuple[List[int], bool]:
        n = len(memb)
        memb = list(memb)
        used = set(memb)
        free = [c for c in range(n) if c not in used]
        free.reverse()
        seen_cluster = set()
        visited = [False] * n
        changed = False
        for start in range(n):
            if visited[start]:
                continue
            c = memb[start]
            if c in seen_cluster:
                label = free.pop()
                changed = True
            else:
                label = c
                seen_cluster.add(c)
            visited[start] = True
            stack = [start]
            while stack:
                u = stack.pop()
                memb[u] = label
                for v in nbrs[u]:
                    if not visited[v] and memb[v] == c:
                        visited[v] = True
                        stack.append(v)
        return memb, changed

    # ── Driver ────────────────────────────────────────────────────

    def check(self, membership: Sequence[int], phase: str) -> None:
        if not self.params.check_monotone:
            return
        q = self.measure(membership)
        if q < self.last_quality - self.eps:
            raise ContractViolation(f"quality decreased during {phase}: {self.last_quality!r} -> {q!r}")
        self.last_quality = q

    def descend(
        self, base: Tuple[List[List[int]], List[List[float]], List[float]], membership: List[int]
    ) -> List[int]:
        """One move/refine/aggregate descent that starts from `membership`."""
        level = base
        comm = list(membership)
        base_to_level = list(range(len(base[2])))
        for depth in range(self.params.max_iterations):
            comm, _ = self.move_nodes(*level, comm)
            self.check([comm[x] for x in base_to_level], "local moving")
            if len(set(comm)) == len(level[2]):
                break
            refined = self.refine(*level, comm)
            if len(set(refined)) == len(level[2]):
                break
            level, comm, mapping = self.aggregate(*level, refined, comm)
            base_to_level = [mapping[x] for x in base_to_level]
            self.check([comm[x] for x in base_to_level], "aggregation")
            logger.debug("leiden level %d: %d aggregate nodes", depth + 1, len(level[2]))
        return [comm[x] for x in base_to_level]

    def polish(self, nbrs: List[List[int]], wts: List[List[float]], k: List[float], membership: List[int]) -> List[int]:
        for _ in range(self.params.max_iterations):
            membership, moved = self.move_nodes(nbrs, wts, k, membership)
            self.check(membership, "polish moving")
            membership, split_any = self.split_disconnected(nbrs, membership)
            self.check(membership, "polish splitting")
            if not moved and not split_any:
                break
        return membership

    def run(self) -> List[int]:
        n = self.g.node_count
        base_nbrs, base_wts = self.g.neighbor_lists()
        base_k = self.g.node_strength.tolist()
        if self.two_m == 0:
            return list(range(n))
        base = (base_nbrs, base_wts, base_k)
        membership = list(range(n))
        self.check(membership, "start")
        best_q = self.measure(membership)

        # each pass refines and re-aggregates the previous partition
        for iteration in range(self.params.max_iterations):
            candidate = self.descend(base, membership)
            candidate = self.polish(base_nbrs, base_wts, base_k, candidate)
            q = self.measure(candidate)
            logger.debug("leiden pass %d: Q=%.12g", iteration + 1, q)
            if q < best_q:
                break
            gained = q - best_q
            membership, best_q = candidate, q
            if gained < self.eps:
                break
        return membership

    def measure(self, membership: Sequence[int]) -> float:
        return _quality(self.g, np.asarray(membership, dtype=np.int64), self.gamma, self.two_m)


def cluster(g: WeightedGraph, gamma: float, params: Optional[LeidenParams] = None) -> Partition:
    params = params or LeidenParams()
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    n = g.node_count
    if n == 0:
        raise ValueError("cannot cluster an empty graph")

    order = sorted(range(n), key=g.ids.__getitem__)
    pos = np.empty(n, dtype=np.int64)
    pos[np.asarray(order, dtype=np.int64)] = np.arange(n, dtype=np.int64)
    canonical_ids = tuple(g.ids[i] for i in order)
    canonical = WeightedGraph.from_arrays(canonical_ids, pos[g.rows], pos[g.cols], g.weights)

    rng = np.random.default_rng([params.seed, canonical_id_hash(g.ids)])
    raw = _Leiden(canonical, float(gamma), params, rng).run()
    dense = Partition.from_labels(canonical_ids, raw).membership
    result = Partition(g.ids, dense[pos])
    logger.debug("cluster gamma=%g: %d nodes -> %d clusters", gamma, n, result.cluster_count)
    return result


def sweep(
    g: WeightedGraph,
    gammas: Sequence[float],
    params: Optional[LeidenParams] = None,
    workers: int = 1,
) -> List[Tuple[float, Partition]]:
    """One independent run per gamma; results keep input order."""
    gammas = [float(x) for x in gammas]
    if not gammas:
        raise ValueError("gammas must be non-empty")
    if gammas != sorted(gammas):
        raise ValueError("gammas must be sorted ascending")
    params = params or LeidenParams()
    if workers > 1 and len(gammas) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(cluster, repeat(g), gammas, repeat(params)))
    else:
        parts = [cluster(g, gamma, params) for gamma in gammas]
    return list(zip(gammas, parts))

import itertools
import unittest

import numpy as np

from splitnet.coupling import (
    CouplingConfig,
    bibliographic_coupling,
    co_citation,
    couple,
    directed_relatedness,
    normalize_relatedness,
    top_m_filter,
)
from splitnet.graph import CitationGraph, WeightedGraph
from splitnet.pipeline import build_network


def random_digraph(seed: int) -> CitationGraph:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 65))
    p = float(rng.uniform(0.02, 0.2))
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return CitationGraph.from_indices([f"v{i:02d}" for i in range(n)], src, dst)


def shared_neighbor_oracle(neighbors):
    out = {}
    for i, j in itertools.combinations(range(len(neighbors)), 2):
        shared = len(set(neighbors[i]) & set(neighbors[j]))
        if shared:
            out[(i, j)] = shared
    return out


def as_pairs(wg: WeightedGraph, ids):
    index = {ext: i for i, ext in enumerate(ids)}
    return {
        tuple(sorted((index[wg.ids[u]], index[wg.ids[v]]))): w for u, v, w in wg.edge_list()
    }


class CouplingOracleTests(unittest.TestCase):
    def test_matches_set_intersection_and_matrix_products(self) -> None:
        for seed in range(100):
            g = random_digraph(seed)
            bc = as_pairs(bibliographic_coupling(g), g.ids)
            cc = as_pairs(co_citation(g), g.ids)
            self.assertEqual(bc, shared_neighbor_oracle(g.out_adjacency), seed)
            self.assertEqual(cc, shared_neighbor_oracle(g.in_adjacency), seed)

            a = g.adjacency.toarray()
            aat = a @ a.T
            ata = a.T @ a
            for (i, j), w in bc.items():
                self.assertEqual(w, aat[i, j])
            for (i, j), w in cc.items():
                self.assertEqual(w, ata[i, j])
            self.assertEqual(len(bc), int(np.count_nonzero(np.triu(aat, k=1))))
            self.assertEqual(len(cc), int(np.count_nonzero(np.triu(ata, k=1))))

    def test_co_citation_is_coupling_of_reversed_graph(self) -> None:
        g = random_digraph(7)
        cc = co_citation(g)
        bc_rev = bibliographic_coupling(g.reversed())
        self.assertEqual(cc.ids, bc_rev.ids)
        self.assertEqual(cc.edge_list(), bc_rev.edge_list())

    def test_weights_are_integers(self) -> None:
        wg = bibliographic_coupling(random_digraph(3))
        self.assertTrue(np.issubdtype(wg.weights.dtype, np.integer))

    def test_toy_graph(self) -> None:
        g = CitationGraph.from_edges([("A", "B"), ("A", "C"), ("B", "C")])
        cc = co_citation(g)
        self.assertEqual(cc.ids, ("B", "C"))
        self.assertEqual(cc.edge_list(), [(0, 1, 1)])
        self.assertEqual(bibliographic_coupling(g).edge_count, 1)

    def test_couple_dispatch(self) -> None:
        g = random_digraph(1)
        self.assertEqual(couple(g, "BC").edge_list(), bibliographic_coupling(g).edge_list())
        with self.assertRaises(ValueError):
            couple(g, "DC")

    def test_config_validation(self) -> None:
        self.assertEqual(CouplingConfig("CC").top_m, 20)
        for measure, top_m in [("DC", 20), ("BC", 0), ("BC", True), ("CC", 2.5)]:
            with self.assertRaises(ValueError):
                CouplingConfig(measure, top_m)

    def test_build_rejects_bad_top_m(self) -> None:
        with self.assertRaisesRegex(ValueError, "top_m"):
            build_network(random_digraph(2), "BC", "eq1", top_m=0)


class TopMFilterTests(unittest.TestCase):
    def _star(self) -> WeightedGraph:
        # hub 0 linked to 1..4 with weights 4, 3, 2, 1
        return WeightedGraph.from_arrays(("h", "a", "b", "c", "d"), [0, 0, 0, 0], [1, 2, 3, 4], [4, 3, 2, 1])

    def test_union_rule_keeps_edges_ranked_by_either_endpoint(self) -> None:
        # every leaf ranks its only edge first, so nothing is dropped
        self.assertEqual(top_m_filter(self._star(), 1).edge_count, 4)

    def test_drops_edge_outside_both_top_lists(self) -> None:
        ids = ("a", "b", "c", "d")
        wg = WeightedGraph.from_arrays(ids, [0, 0, 1, 2, 0, 1], [1, 2, 2, 3, 3, 3], [5, 5, 5, 5, 1, 1])
        filtered = top_m_filter(wg, 1)
        edges = {(filtered.ids[u], filtered.ids[v]) for u, v, _ in filtered.edge_list()}
        self.assertNotIn(("a", "d"), edges)
        self.assertNotIn(("b", "d"), edges)
        self.assertNotIn(("b", "c"), edges)
        self.assertIn(("c", "d"), edges)

    def test_ties_resolved_by_partner_index(self) -> None:
        ids = ("a", "b", "c")
        wg = WeightedGraph.from_arrays(ids, [0, 0, 1], [1, 2, 2], [1, 1, 1])
        self.assertEqual(top_m_filter(wg, 1).edge_count, 2)

    def test_identity_when_degrees_below_m(self) -> None:
        g = random_digraph(11)
        bc = bibliographic_coupling(g)
        m = max(1, int(bc.degree.max(initial=0)))
        filtered = top_m_filter(bc, m)
        self.assertEqual(filtered.ids, bc.ids)
        self.assertEqual(filtered.edge_list(), bc.edge_list())

    def test_rejects_bad_m(self) -> None:
        with self.assertRaises(ValueError):
            top_m_filter(self._star(), 0)


class RelatednessNormalizationTests(unittest.TestCase):
    def test_directed_sums_are_one(self) -> None:
        for seed in range(100):
            wg = bibliographic_coupling(random_digraph(seed))
            if wg.edge_count == 0:
                continue
            src, _, values = directed_relatedness(wg)
            sums = np.bincount(src, weights=values, minlength=wg.node_count)
            np.testing.assert_allclose(sums, 1.0, atol=1e-12)

    def test_stored_weight_is_mean_of_both_directions(self) -> None:
        wg = WeightedGraph.from_arrays(("a", "b", "c"), [0, 1], [1, 2], [2, 1])
        norm = normalize_relatedness(wg)
        # a: s=2, b: s=3, c: s=1
        self.assertAlmostEqual(norm.weights[0], (2 / 2 + 2 / 3) / 2)
        self.assertAlmostEqual(norm.weights[1], (1 / 3 + 1 / 1) / 2)


if __name__ == "__main__":
    unittest.main()

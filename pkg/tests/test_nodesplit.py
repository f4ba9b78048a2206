import itertools
import unittest

import numpy as np

from splitnet.coupling import bibliographic_coupling, co_citation
from splitnet.graph import CitationGraph, ContractViolation
from splitnet.leiden import LeidenParams, Partition, cluster
from splitnet.nodesplit import (
    Layer,
    NormalizationMode,
    SplitCounter,
    SplitGraph,
    method_tag,
    normalize_split,
    project_layer,
    split,
    split_giant_component,
)

from test_coupling import random_digraph


def toy() -> CitationGraph:
    return CitationGraph.from_edges([("A", "B"), ("A", "C"), ("B", "C")])


def two_blocks() -> CitationGraph:
    edges = [(a, b) for a in ("a1", "a2") for b in ("b1", "b2")]
    edges += [(c, d) for c in ("c1", "c2") for d in ("d1", "d2")]
    return CitationGraph.from_edges(edges)


class SplitStructureTests(unittest.TestCase):
    def test_toy_graph(self) -> None:
        sg = split(toy())
        self.assertEqual((sg.node_count, sg.edge_count), (4, 3))
        self.assertEqual(sg.external_ids, ("A:o", "B:o", "B:i", "C:i"))
        wg = sg.to_weighted()
        pairs = {(wg.ids[u], wg.ids[v]) for u, v, _ in wg.edge_list()}
        self.assertEqual(pairs, {("A:o", "B:i"), ("A:o", "C:i"), ("B:o", "C:i")})

    def test_provenance_maps_copies_to_origin(self) -> None:
        sg = split(toy())
        prov = {node.external_id: origin.external_id for node, origin in sg.provenance.items()}
        self.assertEqual(prov, {"A:o": "A", "B:o": "B", "B:i": "B", "C:i": "C"})

    def test_structural_suite_on_random_digraphs(self) -> None:
        for seed in range(100):
            g = random_digraph(seed)
            sg = split(g)
            sg.check()
            wg = sg.to_weighted()
            # bipartite: every edge joins the citing block to the cited block
            self.assertTrue(np.all(wg.rows < sg.citing_count))
            self.assertTrue(np.all(wg.cols >= sg.citing_count))
            self.assertEqual(sg.edge_count, g.edge_count)
            self.assertEqual(sg.citing_count, int(np.count_nonzero(g.out_degree)))
            self.assertEqual(sg.cited_count, int(np.count_nonzero(g.in_degree)))

            refs = {}
            citers = {}
            for c, d in zip(sg.citing.tolist(), sg.cited.tolist()):
                refs.setdefault(int(sg.citing_origin[c]), set()).add(d)
                citers.setdefault(int(sg.cited_origin[d]), set()).add(c)
            second_citing = {
                (u, v) for u, v in itertools.combinations(sorted(refs), 2) if refs[u] & refs[v]
            }
            second_cited = {
                (u, v) for u, v in itertools.combinations(sorted(citers), 2) if citers[u] & citers[v]
            }
            bc = bibliographic_coupling(g)
            cc = co_citation(g)
            index = g.index
            bc_pairs = {tuple(sorted((index[bc.ids[u]], index[bc.ids[v]]))) for u, v, _ in bc.edge_list()}
            cc_pairs = {tuple(sorted((index[cc.ids[u]], index[cc.ids[v]]))) for u, v, _ in cc.edge_list()}
            self.assertEqual(second_citing, bc_pairs, seed)
            self.assertEqual(second_cited, cc_pairs, seed)

    def test_split_makes_one_pass(self) -> None:
        g = random_digraph(5)
        counter = SplitCounter()
        split(g, counter)
        self.assertEqual(counter.passes, 1)
        self.assertEqual(counter.edges_visited, g.edge_count)

    def test_from_edges_matches_split(self) -> None:
        g = toy()
        rebuilt = SplitGraph.from_edges([(g.ids[u], g.ids[v], 1) for u, v in zip(g.src, g.dst)])
        self.assertEqual(rebuilt.external_ids, split(g).external_ids)
        self.assertEqual(rebuilt.to_weighted().edge_list(), split(g).to_weighted().edge_list())

    def test_giant_component_and_dangling_removal(self) -> None:
        edges = [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("x", "y")]
        sg = split_giant_component(split(CitationGraph.from_edges(edges)))
        sg.check()
        self.assertEqual(sg.external_ids, ("a1:o", "a2:o", "b1:i", "b2:i"))

    def test_check_rejects_dangling_nodes(self) -> None:
        sg = split(toy())
        broken = SplitGraph(
            sg.origin_ids, sg.citing_origin, np.append(sg.cited_origin, 0), sg.citing, sg.cited, sg.weights
        )
        with self.assertRaises(ContractViolation):
            broken.check()
        self.assertEqual(broken.drop_dangling().cited_count, sg.cited_count)


class NormalizationTests(unittest.TestCase):
    def test_layer_sums_and_binorm_identity(self) -> None:
        for seed in range(100):
            sg = split(random_digraph(seed))
            if sg.edge_count == 0:
                continue
            out = normalize_split(sg, "outnorm")
            np.testing.assert_allclose(out.citing_strength, 1.0, atol=1e-12)
            inn = normalize_split(sg, NormalizationMode.IN)
            np.testing.assert_allclose(inn.cited_strength, 1.0, atol=1e-12)
            bi = normalize_split(sg, "binorm")
            s_out = sg.citing_strength[sg.citing]
            s_in = sg.cited_strength[sg.cited]
            w = sg.weights.astype(np.float64)
            np.testing.assert_allclose(bi.weights**2 * s_out * s_in, w**2, rtol=1e-12)

    def test_raw_is_identity(self) -> None:
        sg = split(toy())
        self.assertIs(normalize_split(sg, "raw"), sg)

    def test_unknown_mode(self) -> None:
        with self.assertRaises(ValueError):
            normalize_split(split(toy()), "eq1")

    def test_toy_outnorm_weights(self) -> None:
        out = normalize_split(split(toy()), "outnorm")
        # A cites two papers, B one
        self.assertEqual(sorted(out.weights.tolist()), [0.5, 0.5, 1.0])


class ProjectionTests(unittest.TestCase):
    def test_two_blocks_give_two_citing_clusters(self) -> None:
        sg = normalize_split(split(two_blocks()), "outnorm")
        joint = cluster(sg.to_weighted(), 1.0, LeidenParams(seed=3))
        citing = project_layer(joint, sg, Layer.CITING)
        self.assertEqual(citing.ids, ("a1", "a2", "c1", "c2"))
        self.assertEqual(citing.cluster_count, 2)
        self.assertEqual(citing.cluster_of("a1"), citing.cluster_of("a2"))
        self.assertNotEqual(citing.cluster_of("a1"), citing.cluster_of("c1"))
        cited = project_layer(joint, sg, "cited")
        self.assertEqual(cited.ids, ("b1", "b2", "d1", "d2"))
        self.assertEqual(cited.cluster_count, 2)

    def test_projection_requires_every_layer_node(self) -> None:
        sg = split(toy())
        partial = Partition.from_labels(["A:o"], [0])
        with self.assertRaises(ContractViolation):
            project_layer(partial, sg, Layer.CITING)

    def test_method_tags(self) -> None:
        self.assertEqual(method_tag(NormalizationMode.OUT, Layer.CITING), "BBCC")
        self.assertEqual(method_tag(NormalizationMode.IN, Layer.CITED), "BFCC")
        self.assertEqual(method_tag(NormalizationMode.BI, Layer.CITED), "Split-binorm-cited")


if __name__ == "__main__":
    unittest.main()

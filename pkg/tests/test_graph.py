import io
import unittest

import numpy as np

from splitnet.graph import (
    CitationGraph,
    IngestOptions,
    ParseError,
    WeightedGraph,
    degree_stats,
    giant_component,
    load_edge_list,
    remove_isolated,
    to_undirected,
)


def _load(text: str, **kwargs) -> CitationGraph:
    return load_edge_list(io.BytesIO(text.encode("utf-8")), IngestOptions(**kwargs))


class LoadEdgeListTests(unittest.TestCase):
    def test_toy_graph(self) -> None:
        g = _load("A\tB\nA\tC\nB\tC\n")
        self.assertEqual(g.ids, ("A", "B", "C"))
        self.assertEqual(g.edge_count, 3)
        self.assertEqual(g.out_degree.tolist(), [2, 1, 0])
        self.assertEqual(g.in_degree.tolist(), [0, 1, 2])

    def test_drops_duplicates_and_self_loops_but_keeps_loop_node(self) -> None:
        g = _load("A\tB\nA\tB\nC\tC\n")
        self.assertEqual(g.ids, ("A", "B", "C"))
        self.assertEqual(g.edge_count, 1)
        self.assertEqual(g.stats.duplicates, 1)
        self.assertEqual(g.stats.self_loops, 1)

    def test_skips_comments_and_blank_lines(self) -> None:
        g = _load("# header\n\nA\tB\r\n")
        self.assertEqual(g.edge_count, 1)

    def test_malformed_line_reports_line_number(self) -> None:
        with self.assertRaisesRegex(ParseError, ":2:"):
            _load("A\tB\nA B C\n", source_name="edges.tsv")

    def test_rejects_reserved_suffix(self) -> None:
        with self.assertRaisesRegex(ParseError, "reserved"):
            _load("A:o\tB\n")
        with self.assertRaises(ParseError):
            _load("A\tB:i\n")

    def test_rejects_invalid_utf8(self) -> None:
        with self.assertRaises(ParseError):
            load_edge_list(io.BytesIO(b"A\t\xff\n"))

    def test_allow_list_drops_edges_outside(self) -> None:
        g = _load("A\tB\nA\tZ\n", allow_list=frozenset({"A", "B"}))
        self.assertEqual(g.ids, ("A", "B"))
        self.assertEqual(g.stats.outside_allow_list, 1)

    def test_reordering_lines_gives_identical_graph(self) -> None:
        lines = ["p1\tp2", "p3\tp1", "p2\tp3", "p4\tp1", "p1\tp2"]
        g1 = _load("\n".join(lines) + "\n")
        g2 = _load("\n".join(reversed(lines)) + "\n")
        self.assertEqual(g1.ids, g2.ids)
        np.testing.assert_array_equal(g1.src, g2.src)
        np.testing.assert_array_equal(g1.dst, g2.dst)


class GraphOperationTests(unittest.TestCase):
    def test_remove_isolated(self) -> None:
        g = remove_isolated(_load("A\tB\nC\tC\n"))
        self.assertEqual(g.ids, ("A", "B"))
        self.assertEqual(g.edge_count, 1)

    def test_reciprocal_citations_sum_in_undirected_graph(self) -> None:
        wg = to_undirected(_load("A\tB\nB\tA\nB\tC\n"))
        self.assertEqual(wg.edge_count, 2)
        self.assertEqual(wg.weight(0, 1), 2.0)
        self.assertEqual(wg.weight(1, 2), 1.0)

    def test_adjacency_matches_edges(self) -> None:
        g = _load("A\tB\nA\tC\nB\tC\n")
        dense = g.adjacency.toarray()
        self.assertEqual(dense.tolist(), [[0, 1, 1], [0, 0, 1], [0, 0, 0]])
        self.assertEqual(g.out_neighbors(0).tolist(), [1, 2])
        self.assertEqual(g.in_neighbors(2).tolist(), [0, 1])
        self.assertEqual(g.reversed().out_adjacency, [(), (0,), (0, 1)])

    def test_giant_component_keeps_largest(self) -> None:
        wg = to_undirected(_load("A\tB\nB\tC\nX\tY\n"))
        gcc = giant_component(wg)
        self.assertEqual(gcc.ids, ("A", "B", "C"))
        self.assertEqual(gcc.edge_count, 2)

    def test_giant_component_tie_goes_to_smallest_index(self) -> None:
        wg = to_undirected(_load("C\tD\nA\tB\n"))
        self.assertEqual(giant_component(wg).ids, ("A", "B"))

    def test_degree_stats(self) -> None:
        stats = degree_stats(_load("A\tB\nA\tC\nD\tD\n"))
        self.assertEqual((stats.nodes, stats.edges), (4, 2))
        self.assertEqual((stats.citing_nodes, stats.cited_nodes, stats.isolated), (1, 2, 1))

    def test_weighted_graph_canonicalizes_edges(self) -> None:
        wg = WeightedGraph.from_arrays(("a", "b", "c"), [1, 0, 2], [0, 1, 1], [1, 2, 3])
        self.assertEqual(wg.edge_list(), [(0, 1, 3), (1, 2, 3)])
        self.assertEqual(wg.total_weight, 12.0)

    def test_weighted_graph_rejects_self_loops_and_bad_weights(self) -> None:
        with self.assertRaises(ValueError):
            WeightedGraph.from_arrays(("a", "b"), [0], [0], [1])
        with self.assertRaises(ValueError):
            WeightedGraph.from_arrays(("a", "b"), [0], [1], [0.0])


if __name__ == "__main__":
    unittest.main()

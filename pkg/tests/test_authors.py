import io
import tempfile
import unittest
from pathlib import Path

from splitnet.authors import (
    Authorship,
    author_citation_counts,
    author_citation_graph,
    h_index_table,
    load_authorship,
    top_authors,
)
from splitnet.cli import main
from splitnet.coupling import co_citation
from splitnet.graph import CitationGraph, ParseError
from splitnet.nodesplit import split


def citations() -> CitationGraph:
    # p1 and p2 are cited three times each, p3 once
    return CitationGraph.from_edges(
        [("q1", "p1"), ("q2", "p1"), ("q3", "p1"), ("q1", "p2"), ("q2", "p2"), ("q3", "p2"), ("q1", "p3")]
    )


def authorship() -> Authorship:
    text = "# paper\tauthor\np1\tala\np2\tala\np2\tbob\np3\tcyd\np9\tcyd\np1\tala\n"
    return load_authorship(io.BytesIO(text.encode("utf-8")))


class AuthorshipTests(unittest.TestCase):
    def test_load_deduplicates(self) -> None:
        a = authorship()
        self.assertEqual(len(a.pairs), 5)
        self.assertEqual(a.authors, ["ala", "bob", "cyd"])
        self.assertEqual(a.authors_of["p2"], ["ala", "bob"])

    def test_malformed_line(self) -> None:
        with self.assertRaisesRegex(ParseError, ":2:"):
            load_authorship(io.BytesIO(b"p1\tala\np2\n"))

    def test_counts_and_ranking(self) -> None:
        counts = author_citation_counts(citations(), authorship())
        self.assertEqual(counts, {"ala": [3, 3], "bob": [3], "cyd": [1, 0]})
        self.assertEqual(top_authors(counts, 2), [("ala", 2), ("bob", 1)])
        self.assertEqual(top_authors(counts, 10), [("ala", 2), ("bob", 1), ("cyd", 1)])
        with self.assertRaises(ValueError):
            top_authors(counts, 0)

    def test_author_graph_is_bipartite(self) -> None:
        g = author_citation_graph(citations(), authorship(), ["ala", "bob"])
        edges = {(g.ids[u], g.ids[v]) for u, v in zip(g.src.tolist(), g.dst.tolist())}
        self.assertEqual(
            edges,
            {("q1", "ala"), ("q2", "ala"), ("q3", "ala"), ("q1", "bob"), ("q2", "bob"), ("q3", "bob")},
        )
        sg = split(g)
        self.assertEqual(sorted(sg.origin_ids[i] for i in sg.cited_origin), ["ala", "bob"])
        cc = co_citation(g)
        self.assertEqual(cc.ids, ("ala", "bob"))
        self.assertEqual(cc.edge_list(), [(0, 1, 3)])

    def test_author_id_collision(self) -> None:
        a = Authorship((("p1", "q1"),))
        with self.assertRaises(ValueError):
            author_citation_graph(citations(), a, ["q1"])

    def test_h_index_table(self) -> None:
        counts = author_citation_counts(citations(), authorship())
        frame = h_index_table(counts, top_authors(counts, 3))
        self.assertEqual(list(frame.columns), ["author", "h_index", "papers", "citations"])
        self.assertEqual(frame.iloc[0].tolist(), ["ala", 2, 2, 6])


class AuthorsCliTests(unittest.TestCase):
    def test_writes_outputs(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            root = Path(td)
            (root / "edges.tsv").write_text(
                "".join(f"{u}\t{v}\n" for u, v in [("q1", "p1"), ("q2", "p1"), ("q1", "p2")]), encoding="utf-8"
            )
            (root / "authors.tsv").write_text("p1\tala\np2\tbob\n", encoding="utf-8")
            rc = main(
                [
                    "authors",
                    "--input",
                    str(root / "edges.tsv"),
                    "--authorship",
                    str(root / "authors.tsv"),
                    "--top",
                    "1",
                    "--out",
                    str(root / "out"),
                ]
            )
            self.assertEqual(rc, 0)
            self.assertEqual(
                (root / "out" / "author_citations.tsv").read_text(encoding="utf-8"), "q1\tala\nq2\tala\n"
            )
            self.assertEqual(
                (root / "out" / "h_index.csv").read_text(encoding="utf-8"),
                "author,h_index,papers,citations\nala,1,1,2\n",
            )


if __name__ == "__main__":
    unittest.main()

"""Author coupling: citations from papers to the authors of the cited papers.

Selected authors are ranked by their h-index inside the citation set. The
paper -> author graph is bipartite by construction; splitting it yields a citing
layer of papers and a cited layer of authors, whose clusters group authors cited
by the same papers.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, List, Sequence, Tuple, Union

import pandas as pd

from .graph import CitationGraph, ParseError
from .metrics import h_index

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Authorship:
    pairs: Tuple[Tuple[str, str], ...]

    @cached_property
    def authors_of(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = defaultdict(list)
        for paper, author in self.pairs:
            out[paper].append(author)
        return dict(out)

    @cached_property
    def papers_of(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = defaultdict(list)
        for paper, author in self.pairs:
            out[author].append(paper)
        return dict(out)

    @property
    def authors(self) -> List[str]:
        return sorted(self.papers_of)


def load_authorship(source: Union[BinaryIO, Iterable[bytes]], source_name: str = "<stream>") -> Authorship:
    """Parse `paper_id<TAB>author_id` lines."""
    pairs = set()
    for lineno, raw in enumerate(source, start=1):
        try:
            line = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
        except UnicodeDecodeError as exc:
            raise ParseError(f"{source_name}:{lineno}: input is not valid UTF-8") from exc
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise ParseError(f"{source_name}:{lineno}: expected `paper_id<TAB>author_id`")
        pairs.add((fields[0].strip(), fields[1].strip()))
    return Authorship(tuple(sorted(pairs)))


def read_authorship(path: Path) -> Authorship:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Authorship file not found: {path}")
    with path.open("rb") as handle:
        return load_authorship(handle, str(path))


def author_citation_counts(g: CitationGraph, authorship: Authorship) -> Dict[str, List[int]]:
    index = g.index
    in_degree = g.in_degree
    counts: Dict[str, List[int]] = {}
    for author, papers in authorship.papers_of.items():
        counts[author] = [int(in_degree[index[p]]) if p in index else 0 for p in sorted(papers)]
    return counts


def top_authors(counts: Dict[str, Sequence[int]], n: int) -> List[Tuple[str, int]]:
    if n < 1:
        raise ValueError("n must be >= 1")
    ranked = sorted(((author, h_index(c)) for author, c in counts.items()), key=lambda item: (-item[1], item[0]))
    return ranked[:n]


def author_citation_graph(g: CitationGraph, authorship: Authorship, authors: Iterable[str]) -> CitationGraph:
    selected = set(authors)
    clash = sorted(selected.intersection(g.ids))
    if clash:
        raise ValueError(f"author id {clash[0]!r} collides with a paper id")
    authors_of = authorship.authors_of
    edges = set()
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        for author in authors_of.get(g.ids[v], ()):
            if author in selected:
                edges.add((g.ids[u], author))
    logger.info("author graph: %d selected authors, %d paper->author citations", len(selected), len(edges))
    return CitationGraph.from_edges(sorted(edges))


def h_index_table(counts: Dict[str, Sequence[int]], ranked: Sequence[Tuple[str, int]]) -> pd.DataFrame:
    rows = [
        {"author": author, "h_index": h, "papers": len(counts[author]), "citations": int(sum(counts[author]))}
        for author, h in ranked
    ]
    return pd.DataFrame(rows, columns=["author", "h_index", "papers", "citations"])

"""Readers and writers for edge lists, networks, partitions and labels."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from .constants import CITED_SUFFIX, CITING_SUFFIX
from .graph import CitationGraph, IngestOptions, ParseError, WeightedGraph, load_edge_list
from .leiden import Partition
from .metrics import LabelSet
from .nodesplit import SplitGraph


def _require_file(path: Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{what} not found: {path}")
    return path


def _data_lines(path: Path) -> List[Tuple[int, List[str]]]:
    rows: List[Tuple[int, List[str]]] = []
    with path.open("rb") as handle:
        for lineno, raw in enumerate(handle, start=1):
            try:
                line = raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: input is not valid UTF-8") from exc
            if not line.strip() or line.startswith("#"):
                continue
            rows.append((lineno, line.split("\t")))
    return rows


def format_weight(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _parse_weight(text: str, where: str) -> float:
    try:
        value = int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError as exc:
            raise ParseError(f"{where}: invalid weight {text!r}") from exc
    if not value > 0:
        raise ParseError(f"{where}: weight must be > 0")
    return value


# ── Edge lists ────────────────────────────────────────────────────


def read_allow_list(path: Path) -> FrozenSet[str]:
    path = _require_file(path, "Allow-list file")
    return frozenset(fields[0].strip() for _, fields in _data_lines(path))


def read_edge_list(path: Path, allow_list: Optional[FrozenSet[str]] = None) -> CitationGraph:
    path = _require_file(path, "Edge-list file")
    with path.open("rb") as handle:
        return load_edge_list(handle, IngestOptions(allow_list=allow_list, source_name=str(path)))


def write_edge_list(path: Path, g: CitationGraph) -> None:
    lines = [f"{g.ids[u]}\t{g.ids[v]}\n" for u, v in sorted(zip(g.src.tolist(), g.dst.tolist()))]
    Path(path).write_text("".join(lines), encoding="utf-8")


# ── Networks ──────────────────────────────────────────────────────


def write_weighted_graph(path: Path, wg: WeightedGraph) -> None:
    """`u<TAB>v<TAB>weight` with u < v by external id, lines sorted."""
    rows = []
    for u, v, w in zip(wg.rows.tolist(), wg.cols.tolist(), wg.weights):
        a, b = sorted((wg.ids[u], wg.ids[v]))
        rows.append((a, b, format_weight(w)))
    rows.sort()
    Path(path).write_text("".join(f"{a}\t{b}\t{w}\n" for a, b, w in rows), encoding="utf-8")


def read_weighted_graph(path: Path) -> WeightedGraph:
    path = _require_file(path, "Network file")
    triples = []
    for lineno, fields in _data_lines(path):
        if len(fields) != 3:
            raise ParseError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
        triples.append((fields[0], fields[1], _parse_weight(fields[2], f"{path}:{lineno}")))
    ids = sorted({a for a, _, _ in triples} | {b for _, b, _ in triples})
    index = {ext: i for i, ext in enumerate(ids)}
    return WeightedGraph.from_arrays(
        ids,
        [index[a] for a, _, _ in triples],
        [index[b] for _, b, _ in triples],
        np.array([w for _, _, w in triples]) if triples else np.zeros(0, dtype=np.int64),
    )


def write_split_graph(path: Path, sg: SplitGraph) -> None:
    """`origin:o<TAB>origin:i<TAB>weight`, lines sorted."""
    rows = []
    for c, d, w in zip(sg.citing.tolist(), sg.cited.tolist(), sg.weights):
        a = sg.origin_ids[int(sg.citing_origin[c])] + CITING_SUFFIX
        b = sg.origin_ids[int(sg.cited_origin[d])] + CITED_SUFFIX
        rows.append((a, b, format_weight(w)))
    rows.sort()
    Path(path).write_text("".join(f"{a}\t{b}\t{w}\n" for a, b, w in rows), encoding="utf-8")


def read_split_graph(path: Path) -> SplitGraph:
    path = _require_file(path, "Split-graph file")
    triples = []
    for lineno, fields in _data_lines(path):
        where = f"{path}:{lineno}"
        if len(fields) != 3:
            raise ParseError(f"{where}: expected 3 tab-separated fields, got {len(fields)}")
        a, b = fields[0], fields[1]
        if not a.endswith(CITING_SUFFIX) or not b.endswith(CITED_SUFFIX):
            raise ParseError(f"{where}: expected `id{CITING_SUFFIX}<TAB>id{CITED_SUFFIX}<TAB>weight`")
        triples.append((a[: -len(CITING_SUFFIX)], b[: -len(CITED_SUFFIX)], _parse_weight(fields[2], where)))
    return SplitGraph.from_edges(triples)


# ── Partitions ────────────────────────────────────────────────────


def write_partition(path: Path, p: Partition, header: Mapping[str, object]) -> None:
    """`external_id<TAB>cluster_id` sorted by id, after a `# key=value` header."""
    head = " ".join(f"{k}={v}" for k, v in header.items())
    order = sorted(range(p.node_count), key=p.ids.__getitem__)
    body = "".join(f"{p.ids[i]}\t{int(p.membership[i])}\n" for i in order)
    Path(path).write_text(f"# {head}\n{body}", encoding="utf-8")


def read_partition(path: Path) -> Tuple[Partition, Dict[str, str]]:
    path = _require_file(path, "Partition file")
    header: Dict[str, str] = {}
    with path.open("r", encoding="utf-8") as handle:
        first = handle.readline()
    if first.startswith("#"):
        for token in first[1:].split():
            key, sep, value = token.partition("=")
            if sep:
                header[key] = value
    ids: List[str] = []
    labels: List[int] = []
    for lineno, fields in _data_lines(path):
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}")
        try:
            labels.append(int(fields[1]))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: cluster id must be an integer") from exc
        ids.append(fields[0])
    if len(set(ids)) != len(ids):
        raise ParseError(f"{path}: node assigned more than once")
    return Partition.from_labels(ids, labels), header


# ── Labels ────────────────────────────────────────────────────────


def read_labels(path: Path) -> LabelSet:
    """`external_id<TAB>label<TAB>confidence` lines."""
    path = _require_file(path, "Label file")
    try:
        frame = pd.read_csv(
            path,
            sep="\t",
            header=None,
            names=["node", "label", "confidence"],
            comment="#",
            dtype={"node": str, "label": str},
            keep_default_na=False,
        )
        confidence = pd.to_numeric(frame["confidence"], errors="raise")
    except (ValueError, pd.errors.ParserError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return LabelSet.from_triples(zip(frame["node"], frame["label"], confidence))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_labels(path: Path, labels: LabelSet) -> None:
    frame = labels.to_frame().sort_values(["node", "label"], kind="mergesort")
    frame.to_csv(path, sep="\t", header=False, index=False, float_format="%.12g", lineterminator="\n")

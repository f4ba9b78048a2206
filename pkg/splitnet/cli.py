"""CLI entrypoint for splitnet."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .authors import author_citation_counts, author_citation_graph, h_index_table, read_authorship, top_authors
from .bench import run_bench
from .config import PipelineConfig, load_config
from .constants import (
    DEFAULT_BENCH_SCALES,
    DEFAULT_SEED,
    EXIT_CONFIG,
    EXIT_CONTRACT,
    EXIT_OK,
    EXIT_PARSE,
    FLOAT_FORMAT,
    METHODS,
)
from .experiments import run_comparison
from .formats import read_edge_list, read_labels, write_edge_list, write_labels
from .graph import ContractViolation, ParseError
from .pipeline import (
    append_csv_row,
    build_from_config,
    compare_files,
    evaluate_partitions,
    load_input,
    record_comparison,
    run_cluster,
    stored_network_config,
    write_frame,
    write_network,
)
from .rundir import refresh_manifest, write_manifest
from .synth import PlantedParams, planted_partition
from .util import format_gamma, parse_gammas
from .validate import ValidationError, raise_on_errors, validate_config

_LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def _seed(text: str) -> int:
    return int(text, 0)


def _config_from_args(
    args: argparse.Namespace, require_input: bool = True, reuse_network: bool = False
) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    stored = stored_network_config(Path(args.out)) if reuse_network and getattr(args, "out", None) else None
    if stored is not None and not getattr(args, "config", None) and getattr(args, "method", None) in (None, stored.method):
        # flags left unset fall back to the network already in --out
        cfg.method, cfg.normalization, cfg.top_m = stored.method, stored.norm, stored.top_m
    overrides = {
        "input_path": Path(args.input) if getattr(args, "input", None) else None,
        "method": getattr(args, "method", None),
        "normalization": getattr(args, "norm", None),
        "top_m": getattr(args, "top_m", None),
        "gammas": tuple(parse_gammas(args.gammas)) if getattr(args, "gammas", None) else None,
        "seed": getattr(args, "seed", None),
        "gcc_only": getattr(args, "gcc", None),
        "output_dir": Path(args.out) if getattr(args, "out", None) else None,
        "allow_list": Path(args.allow_list) if getattr(args, "allow_list", None) else None,
        "workers": getattr(args, "workers", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "record_timings", False):
        cfg.record_timings = True
    raise_on_errors(validate_config(cfg, require_input=require_input))
    if cfg.output_dir is None:
        raise ValidationError("--out (or output_dir in the config) is required")
    return cfg


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with a [pipeline] table")
    p.add_argument("--input", help="Citation edge list (citing<TAB>cited)")
    p.add_argument("--method", choices=list(METHODS), help="Network type")
    p.add_argument("--norm", help="raw/outnorm/innorm/binorm for Split, eq1/none otherwise")
    p.add_argument("--top-m", dest="top_m", type=int, help="Top-M filter for BC/CC (default: 20)")
    p.add_argument("--gammas", help="Resolution grid: `0.5,1,1.5` or `start:stop:step`")
    p.add_argument("--seed", type=_seed, help=f"Random seed (default: {DEFAULT_SEED})")
    p.add_argument("--gcc", action=argparse.BooleanOptionalAction, default=None, help="Keep only the giant component")
    p.add_argument("--allow-list", dest="allow_list", help="File of node ids to keep")
    p.add_argument("--out", help="Run directory")


# ── Commands ──────────────────────────────────────────────────────


def _cmd_build(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    built = build_from_config(cfg)
    path = write_network(cfg.output_dir, cfg, built)
    print(f"{built.tag}: {built.graph.node_count} nodes, {built.graph.edge_count} edges -> {path}")
    return EXIT_OK


def _cmd_cluster(args: argparse.Namespace) -> int:
    # the input is only read when the run directory holds no network yet
    cfg = _config_from_args(args, require_input=False, reuse_network=True)
    report = run_cluster(cfg)
    for entry in report.entries:
        print(
            f"{entry.method} gamma={format_gamma(entry.gamma)}: {entry.cluster_count} clusters "
            f"(G={entry.granularity:.4g}) -> {entry.partition_file}"
        )
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    row = compare_files(Path(args.left), Path(args.right))
    print(f"nmi={row['nmi']:.12g} shared_nodes={row['shared_nodes']} dropped_nodes={row['dropped_nodes']}")
    recorded = record_comparison(Path(args.out), row) if args.out else None
    if args.csv and Path(args.csv) != recorded:
        csv_path = Path(args.csv)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        append_csv_row(csv_path, row)
        refresh_manifest(csv_path)
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    frame = evaluate_partitions([Path(p) for p in args.partitions], Path(args.labels))
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        write_frame(Path(args.csv), frame)
        refresh_manifest(Path(args.csv))
        print(f"Wrote {args.csv}")
    else:
        print(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"), end="")
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    scales = [int(float(s)) for s in args.scales.split(",")] if args.scales else list(DEFAULT_BENCH_SCALES)
    frame = run_bench(scales, args.seed)
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        write_frame(Path(args.csv), frame)
        print(f"Wrote {args.csv}")
    else:
        print(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"), end="")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    params = PlantedParams(groups=args.groups, group_size=args.group_size, p_in=args.p_in, p_out=args.p_out)
    g, labels = planted_partition(params, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(out / "edges.tsv", g)
    write_labels(out / "labels.tsv", labels)
    print(f"{g.node_count} nodes, {g.edge_count} citations -> {out / 'edges.tsv'}, {out / 'labels.tsv'}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    g = load_input(cfg)
    labels = read_labels(Path(args.labels)) if args.labels else None
    report = run_comparison(g, cfg.gammas, cfg.leiden_params(), cfg.top_m, labels)
    for path in report.write(cfg.output_dir):
        print(f"Wrote {path}")
    return EXIT_OK


def _cmd_authors(args: argparse.Namespace) -> int:
    g = read_edge_list(Path(args.input))
    authorship = read_authorship(Path(args.authorship))
    counts = author_citation_counts(g, authorship)
    ranked = top_authors(counts, args.top)
    author_graph = author_citation_graph(g, authorship, [a for a, _ in ranked])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(out / "author_citations.tsv", author_graph)
    write_frame(out / "h_index.csv", h_index_table(counts, ranked))
    write_manifest(out)
    print(f"{len(ranked)} authors, {author_graph.edge_count} paper->author citations -> {out}")
    return EXIT_OK


# ── Entry point ───────────────────────────────────────────────────


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog=os.path.basename(sys.argv[0]))
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_build = sub.add_parser("build", help="Build a DC, BC, CC or Split network")
    _add_pipeline_flags(p_build)
    p_build.set_defaults(func=_cmd_build)

    p_cluster = sub.add_parser("cluster", help="Cluster a network over a gamma sweep")
    _add_pipeline_flags(p_cluster)
    p_cluster.add_argument("--workers", type=int, help="Parallel gamma runs (default: 1)")
    p_cluster.add_argument("--record-timings", action="store_true", help="Store wall times in report.json")
    p_cluster.set_defaults(func=_cmd_cluster)

    p_compare = sub.add_parser("compare", help="NMI between two partition files")
    p_compare.add_argument("left", help="Partition file")
    p_compare.add_argument("right", help="Partition file")
    p_compare.add_argument("--csv", help="CSV file to append the comparison to")
    p_compare.add_argument("--out", help="Run directory (appends to comparisons.csv)")
    p_compare.set_defaults(func=_cmd_compare)

    p_eval = sub.add_parser("evaluate", help="NMI of partitions against external labels")
    p_eval.add_argument("partitions", nargs="+", help="Partition files")
    p_eval.add_argument("--labels", required=True, help="Label file (id<TAB>label<TAB>confidence)")
    p_eval.add_argument("--csv", help="Output CSV (default: stdout)")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_bench = sub.add_parser("bench", help="Time node split against coupling construction")
    p_bench.add_argument("--scales", help="Comma-separated citation counts (default: 1e5,2e5,4e5)")
    p_bench.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="Generator seed")
    p_bench.add_argument("--csv", help="Output CSV (default: stdout)")
    p_bench.set_defaults(func=_cmd_bench)

    p_synth = sub.add_parser("synth", help="Generate a planted-partition citation graph")
    p_synth.add_argument("--groups", type=int, default=4, help="Number of planted groups")
    p_synth.add_argument("--group-size", dest="group_size", type=int, default=32, help="Nodes per group")
    p_synth.add_argument("--p-in", dest="p_in", type=float, default=0.3, help="Within-group edge probability")
    p_synth.add_argument("--p-out", dest="p_out", type=float, default=0.02, help="Across-group edge probability")
    p_synth.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="Generator seed")
    p_synth.add_argument("--out", required=True, help="Output directory (edges.tsv, labels.tsv)")
    p_synth.set_defaults(func=_cmd_synth)

    p_report = sub.add_parser("report", help="Compare all methods and write figure-shaped CSVs")
    _add_pipeline_flags(p_report)
    p_report.add_argument("--labels", help="Label file for accuracy.csv")
    p_report.set_defaults(func=_cmd_report)

    p_authors = sub.add_parser("authors", help="Build the paper->author citation network of top authors")
    p_authors.add_argument("--input", required=True, help="Citation edge list")
    p_authors.add_argument("--authorship", required=True, help="paper_id<TAB>author_id file")
    p_authors.add_argument("--top", type=int, default=100, help="Number of authors by h-index")
    p_authors.add_argument("--out", required=True, help="Output directory")
    p_authors.set_defaults(func=_cmd_authors)

    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=_LOG_FORMAT, stream=sys.stderr)
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError) as exc:
        print(str(exc))
        return EXIT_PARSE
    except ContractViolation as exc:
        print(str(exc))
        return EXIT_CONTRACT
    except (ValidationError, ValueError) as exc:
        print(str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())

"""Network construction and clustering stages behind the CLI commands."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from .config import PipelineConfig, load_config, write_config_snapshot
from .constants import COUPLING_METHODS, FLOAT_FORMAT
from .coupling import CouplingConfig, couple, normalize_relatedness, top_m_filter
from .formats import (
    read_allow_list,
    read_edge_list,
    read_labels,
    read_partition,
    read_split_graph,
    read_weighted_graph,
    write_partition,
    write_split_graph,
    write_weighted_graph,
)
from .graph import CitationGraph, ContractViolation, WeightedGraph, giant_component, remove_isolated, to_undirected
from .leiden import LeidenParams, Partition, QualityContext, cluster, quality, sweep
from .metrics import compare_partitions, granularity, label_partition, nmi
from .nodesplit import Layer, NormalizationMode, SplitGraph, method_tag, normalize_split, project_layer, split, split_giant_component
from .rundir import RunEntry, RunReport, append_comparison, write_json, write_manifest
from .util import format_gamma
from .validate import raise_on_errors, validate_config

logger = logging.getLogger(__name__)

NETWORK_FILE = "network.tsv"
CONFIG_FILE = "config.toml"
STAGES_FILE = "stages.json"
COMPARISONS_FILE = "comparisons.csv"
PARTITION_DIR = "partitions"


@dataclass(frozen=True)
class StageStat:
    stage: str
    nodes_in: int
    nodes_out: int
    edges_in: int
    edges_out: int
    citing_nodes: Optional[int] = None
    cited_nodes: Optional[int] = None

    def to_dict(self) -> Dict[str, int | str]:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class BuiltNetwork:
    method: str
    norm: str
    top_m: int
    graph: WeightedGraph
    split: Optional[SplitGraph] = None
    stages: List[StageStat] = field(default_factory=list)

    @property
    def tag(self) -> str:
        if self.method in COUPLING_METHODS:
            return f"{self.method}-Top{self.top_m}"
        if self.method == "Split":
            return f"Split-{self.norm}"
        return self.method


@dataclass
class ClusterResult:
    gamma: float
    tag: str
    partition: Partition
    quality: float
    wall_time_ms: float
    layers: Dict[Layer, Partition] = field(default_factory=dict)

    @property
    def granularity(self) -> float:
        return granularity(self.partition)


class _StageLog:
    def __init__(self) -> None:
        self.stages: List[StageStat] = []

    def record(self, stage: str, nodes_in: int, nodes_out: int, edges_in: int, edges_out: int, **layers: int) -> None:
        stat = StageStat(stage, nodes_in, nodes_out, edges_in, edges_out, **layers)
        self.stages.append(stat)
        extra = "".join(f" {k}={v}" for k, v in layers.items())
        logger.info(
            "stage=%s nodes_in=%d nodes_out=%d edges_in=%d edges_out=%d%s",
            stage,
            nodes_in,
            nodes_out,
            edges_in,
            edges_out,
            extra,
        )


def _check_layer_identity(sg: SplitGraph) -> None:
    sg.check()
    if sg.citing_count + sg.cited_count != sg.node_count:
        raise ContractViolation("citing + cited layer sizes differ from the split node count")


# ── Build ─────────────────────────────────────────────────────────


def build_network(g: CitationGraph, method: str, norm: str, top_m: int = 20, gcc_only: bool = True) -> BuiltNetwork:
    """ingest -> remove isolated -> construct -> Top-M (BC/CC) -> GCC -> normalize."""
    log = _StageLog()
    log.record("ingest", g.node_count, g.node_count, g.edge_count, g.edge_count)
    core = remove_isolated(g)
    log.record("remove_isolated", g.node_count, core.node_count, g.edge_count, core.edge_count)

    if method == "Split":
        mode = NormalizationMode.parse(norm)
        sg = split(core)
        _check_layer_identity(sg)
        log.record(
            "split", core.node_count, sg.node_count, core.edge_count, sg.edge_count,
            citing_nodes=sg.citing_count, cited_nodes=sg.cited_count,
        )
        if gcc_only:
            before = sg
            sg = split_giant_component(sg)
            _check_layer_identity(sg)
            log.record(
                "gcc", before.node_count, sg.node_count, before.edge_count, sg.edge_count,
                citing_nodes=sg.citing_count, cited_nodes=sg.cited_count,
            )
        sg = normalize_split(sg, mode)
        log.record(f"normalize:{mode.value}", sg.node_count, sg.node_count, sg.edge_count, sg.edge_count)
        return BuiltNetwork(method, mode.value, top_m, sg.to_weighted(), sg, log.stages)

    normalize = norm == "eq1"
    if method == "DC":
        wg = to_undirected(core)
        log.record("undirected", core.node_count, wg.node_count, core.edge_count, wg.edge_count)
    elif method in COUPLING_METHODS:
        coupling = CouplingConfig(method, top_m, normalize)
        wg = couple(core, coupling.measure)
        log.record(coupling.measure.lower(), core.node_count, wg.node_count, core.edge_count, wg.edge_count)
        filtered = top_m_filter(wg, coupling.top_m)
        log.record(f"top{coupling.top_m}", wg.node_count, filtered.node_count, wg.edge_count, filtered.edge_count)
        wg = filtered
        normalize = coupling.normalize
    else:
        raise ValueError(f"unknown method {method!r}")

    if gcc_only:
        gcc = giant_component(wg)
        log.record("gcc", wg.node_count, gcc.node_count, wg.edge_count, gcc.edge_count)
        wg = gcc
    if normalize:
        wg = normalize_relatedness(wg)
        log.record("normalize:eq1", wg.node_count, wg.node_count, wg.edge_count, wg.edge_count)
    return BuiltNetwork(method, norm, top_m, wg, None, log.stages)


def load_input(cfg: PipelineConfig) -> CitationGraph:
    allow = read_allow_list(cfg.allow_list) if cfg.allow_list is not None else None
    return read_edge_list(cfg.input_path, allow)


def build_from_config(cfg: PipelineConfig) -> BuiltNetwork:
    raise_on_errors(validate_config(cfg))
    return build_network(load_input(cfg), cfg.method, cfg.norm, cfg.top_m, cfg.gcc_only)


def write_network(run_dir: Path, cfg: PipelineConfig, built: BuiltNetwork) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    write_config_snapshot(run_dir / CONFIG_FILE, cfg)
    path = run_dir / NETWORK_FILE
    if built.split is not None:
        write_split_graph(path, built.split)
    else:
        write_weighted_graph(path, built.graph)
    write_json(
        run_dir / STAGES_FILE,
        {"method": built.tag, "stages": [s.to_dict() for s in built.stages]},
    )
    write_manifest(run_dir)
    return path


def stored_network_config(run_dir: Path) -> Optional[PipelineConfig]:
    """The config snapshot of a run directory that already holds a network."""
    run_dir = Path(run_dir)
    if not (run_dir / NETWORK_FILE).exists() or not (run_dir / CONFIG_FILE).exists():
        return None
    return load_config(run_dir / CONFIG_FILE)


def check_network_settings(cfg: PipelineConfig, stored: PipelineConfig) -> None:
    errors: List[str] = []
    if cfg.method != stored.method:
        errors.append(f"method {cfg.method!r} conflicts with the stored network ({stored.method!r})")
    elif cfg.norm != stored.norm:
        errors.append(f"normalization {cfg.norm!r} conflicts with the stored network ({stored.norm!r})")
    elif cfg.method in COUPLING_METHODS and cfg.top_m != stored.top_m:
        errors.append(f"top_m {cfg.top_m} conflicts with the stored network ({stored.top_m})")
    raise_on_errors(errors)


def load_network(run_dir: Path, cfg: PipelineConfig) -> BuiltNetwork:
    """Re-read a network written by `write_network` (already normalized)."""
    path = Path(run_dir) / NETWORK_FILE
    if cfg.method == "Split":
        sg = read_split_graph(path)
        _check_layer_identity(sg)
        return BuiltNetwork(cfg.method, cfg.norm, cfg.top_m, sg.to_weighted(), sg, [])
    return BuiltNetwork(cfg.method, cfg.norm, cfg.top_m, read_weighted_graph(path), None, [])


# ── Cluster ───────────────────────────────────────────────────────


def cluster_network(
    built: BuiltNetwork, gammas: Sequence[float], params: LeidenParams, workers: int = 1
) -> List[ClusterResult]:
    g = built.graph
    if g.node_count == 0:
        raise ValueError("network is empty; nothing to cluster")
    if workers > 1:
        started = time.perf_counter()
        runs = sweep(g, gammas, params, workers=workers)
        per_run = (time.perf_counter() - started) * 1000.0 / len(runs)
        timed = [(gamma, p, per_run) for gamma, p in runs]
    else:
        timed = []
        for gamma in gammas:
            started = time.perf_counter()
            p = cluster(g, gamma, params)
            timed.append((float(gamma), p, (time.perf_counter() - started) * 1000.0))

    results: List[ClusterResult] = []
    for gamma, p, elapsed in timed:
        q = quality(g, p, QualityContext.from_graph(g, gamma))
        result = ClusterResult(gamma, built.tag, p, q, elapsed)
        if built.split is not None:
            for layer in (Layer.CITING, Layer.CITED):
                result.layers[layer] = project_layer(p, built.split, layer)
        logger.info(
            "cluster %s gamma=%s: %d clusters, Q=%.6g, %.1f ms",
            built.tag, format_gamma(gamma), p.cluster_count, q, elapsed,
        )
        results.append(result)
    return results


def _partition_header(tag: str, gamma: float, seed: int, q: float, p: Partition, **extra: str) -> Dict[str, object]:
    header: Dict[str, object] = {
        "method": tag,
        "gamma": format_gamma(gamma),
        "seed": seed,
        "quality": f"{q:.12g}",
        "clusters": p.cluster_count,
    }
    header.update(extra)
    return header


def write_cluster_results(
    run_dir: Path, cfg: PipelineConfig, built: BuiltNetwork, results: Sequence[ClusterResult]
) -> RunReport:
    run_dir = Path(run_dir)
    part_dir = run_dir / PARTITION_DIR
    part_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(stages=[s.to_dict() for s in built.stages])
    mode = NormalizationMode.parse(built.norm) if built.split is not None else None

    for res in results:
        gtxt = format_gamma(res.gamma)
        rel = f"{PARTITION_DIR}/{res.tag}_gamma-{gtxt}.tsv"
        write_partition(run_dir / rel, res.partition, _partition_header(res.tag, res.gamma, cfg.seed, res.quality, res.partition))
        report.entries.append(
            RunEntry(
                method=res.tag,
                gamma=res.gamma,
                cluster_count=res.partition.cluster_count,
                granularity=res.granularity,
                quality=res.quality,
                singletons=res.partition.singleton_count(),
                nodes=built.graph.node_count,
                edges=built.graph.edge_count,
                partition_file=rel,
                wall_time_ms=res.wall_time_ms,
            )
        )
        for layer, lp in res.layers.items():
            tag = method_tag(mode, layer)
            lrel = f"{PARTITION_DIR}/{tag}_gamma-{gtxt}.tsv"
            write_partition(
                run_dir / lrel, lp, _partition_header(tag, res.gamma, cfg.seed, res.quality, lp, layer=layer.value)
            )
            report.entries.append(
                RunEntry(
                    method=tag,
                    gamma=res.gamma,
                    cluster_count=lp.cluster_count,
                    granularity=granularity(lp) if lp.node_count else 0.0,
                    quality=res.quality,
                    singletons=lp.singleton_count(),
                    nodes=lp.node_count,
                    edges=built.graph.edge_count,
                    partition_file=lrel,
                    wall_time_ms=None,
                )
            )
    report.write(run_dir, record_timings=cfg.record_timings)
    write_manifest(run_dir)
    return report


def run_cluster(cfg: PipelineConfig) -> RunReport:
    """Cluster the network in cfg.output_dir, building it first when absent."""
    raise_on_errors(validate_config(cfg, require_input=False))
    run_dir = Path(cfg.output_dir)
    if (run_dir / NETWORK_FILE).exists():
        stored = stored_network_config(run_dir)
        if stored is not None:
            check_network_settings(cfg, stored)
        built = load_network(run_dir, cfg)
        stages_path = run_dir / STAGES_FILE
        if stages_path.exists():
            stored = json.loads(stages_path.read_text(encoding="utf-8"))
            built.stages = [StageStat(**s) for s in stored.get("stages", [])]
    else:
        built = build_from_config(cfg)
        write_network(run_dir, cfg, built)
    results = cluster_network(built, cfg.gammas, cfg.leiden_params(), cfg.workers)
    return write_cluster_results(run_dir, cfg, built, results)


# ── Compare / evaluate ────────────────────────────────────────────


def compare_files(left: Path, right: Path) -> Dict[str, object]:
    p, _ = read_partition(left)
    q, _ = read_partition(right)
    result = compare_partitions(p, q)
    return {
        "left": str(left),
        "right": str(right),
        "shared_nodes": result.shared_nodes,
        "dropped_nodes": result.dropped_nodes,
        "nmi": result.value,
    }


def append_csv_row(path: Path, row: Dict[str, object]) -> None:
    path = Path(path)
    frame = pd.DataFrame([row], columns=list(row))
    frame.to_csv(
        path,
        mode="a",
        header=not path.exists(),
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
    )


def record_comparison(run_dir: Path, row: Dict[str, object]) -> Path:
    """Append a compare row to comparisons.csv and report.json, then rehash the run."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    csv_path = run_dir / COMPARISONS_FILE
    append_csv_row(csv_path, row)
    append_comparison(run_dir, row)
    write_manifest(run_dir)
    return csv_path


def evaluate_partitions(paths: Sequence[Path], labels_path: Path) -> pd.DataFrame:
    labels = read_labels(labels_path)
    rows = []
    for path in paths:
        p, header = read_partition(path)
        reference = label_partition(labels, p.ids)
        if reference.node_count == 0:
            raise ValueError(f"label file covers no node of {path}")
        rows.append(
            {
                "method": header.get("method", Path(path).stem),
                "gamma": float(header.get("gamma", "nan")),
                "granularity": granularity(p),
                "nmi_vs_labels": nmi(p, reference),
            }
        )
    frame = pd.DataFrame(rows, columns=["method", "gamma", "granularity", "nmi_vs_labels"])
    return frame.sort_values(["method", "gamma"], kind="mergesort").reset_index(drop=True)


def write_frame(path: Path, frame: pd.DataFrame) -> None:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

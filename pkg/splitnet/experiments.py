"""One-call comparison of DC, coupling and node-split clusterings over a gamma sweep.

Produces four plot-ready tables:

* ``similarity.csv``: NMI between each split layer and the coupling clusters of
  the same papers, with the BC-vs-CC agreement as baseline.
* ``granularity.csv``: granularity and cluster counts per method and gamma.
* ``accuracy.csv``: NMI against external labels (only when labels are given).
* ``stages.csv``: node and edge counts after every construction stage.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .constants import FLOAT_FORMAT
from .graph import CitationGraph, ContractViolation
from .leiden import LeidenParams, Partition, cluster
from .metrics import LabelSet, compare_partitions, granularity, label_partition, nmi_vs_granularity_curve
from .nodesplit import Layer, NormalizationMode, method_tag, project_layer
from .pipeline import BuiltNetwork, build_network
from .rundir import write_manifest
from .util import format_gamma

logger = logging.getLogger(__name__)

SIMILARITY_COLUMNS = ["target", "norm", "gamma", "nmi", "baseline_nmi"]
GRANULARITY_COLUMNS = ["method", "gamma", "granularity", "cluster_count", "singletons"]
ACCURACY_COLUMNS = ["method", "gamma", "granularity", "cluster_count", "nmi"]
STAGE_COLUMNS = ["method", "stage", "nodes_in", "nodes_out", "edges_in", "edges_out", "citing_nodes", "cited_nodes"]


@dataclass
class ComparisonReport:
    similarity: pd.DataFrame
    granularity: pd.DataFrame
    stages: pd.DataFrame
    accuracy: Optional[pd.DataFrame] = None
    # method -> (granularity, nmi) points sorted by granularity
    curves: Dict[str, List[tuple]] = field(default_factory=dict)

    def nmi_trend(self) -> Dict[str, float]:
        """Share of consecutive curve steps where NMI rises with granularity."""
        trend: Dict[str, float] = {}
        for method, points in self.curves.items():
            steps = [b[1] - a[1] for a, b in zip(points, points[1:])]
            trend[method] = sum(1 for s in steps if s >= 0) / len(steps) if steps else math.nan
        return trend

    def write(self, out_dir: Path) -> List[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        tables = {
            "similarity.csv": self.similarity,
            "granularity.csv": self.granularity,
            "stages.csv": self.stages,
        }
        if self.accuracy is not None:
            tables["accuracy.csv"] = self.accuracy
        written = []
        for name, frame in tables.items():
            path = out_dir / name
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            written.append(path)
        write_manifest(out_dir)
        return written


def _safe_nmi(p: Partition, q: Partition) -> float:
    try:
        return compare_partitions(p, q).value
    except ContractViolation:
        logger.warning("no shared nodes between %d- and %d-node partitions; NMI left empty", p.node_count, q.node_count)
        return math.nan


def _build_all(g: CitationGraph, top_m: int) -> Dict[str, BuiltNetwork]:
    networks = {
        "DC": build_network(g, "DC", "eq1", top_m),
        "BC": build_network(g, "BC", "eq1", top_m),
        "CC": build_network(g, "CC", "eq1", top_m),
    }
    for mode in NormalizationMode:
        networks[f"Split-{mode.value}"] = build_network(g, "Split", mode.value, top_m)
    return networks


def _stage_frame(networks: Dict[str, BuiltNetwork]) -> pd.DataFrame:
    rows = []
    for built in networks.values():
        for stat in built.stages:
            row = {"method": built.tag}
            row.update(stat.to_dict())
            rows.append(row)
    frame = pd.DataFrame(rows, columns=STAGE_COLUMNS)
    # layer counts only exist for split stages
    return frame.astype({"citing_nodes": "Int64", "cited_nodes": "Int64"})


def run_comparison(
    g: CitationGraph,
    gammas: Sequence[float],
    params: Optional[LeidenParams] = None,
    top_m: int = 20,
    labels: Optional[LabelSet] = None,
) -> ComparisonReport:
    params = params or LeidenParams()
    gammas = [float(x) for x in gammas]
    if not gammas:
        raise ValueError("gammas must be non-empty")
    networks = _build_all(g, top_m)
    bc_tag = networks["BC"].tag
    cc_tag = networks["CC"].tag

    similarity, grain, accuracy = [], [], []
    curve_runs: Dict[str, List[tuple]] = {}
    for gamma in gammas:
        parts: Dict[str, Partition] = {
            "DC": cluster(networks["DC"].graph, gamma, params),
            bc_tag: cluster(networks["BC"].graph, gamma, params),
            cc_tag: cluster(networks["CC"].graph, gamma, params),
        }
        baseline = _safe_nmi(parts[bc_tag], parts[cc_tag])
        for mode in NormalizationMode:
            built = networks[f"Split-{mode.value}"]
            joint = cluster(built.graph, gamma, params)
            citing = project_layer(joint, built.split, Layer.CITING)
            cited = project_layer(joint, built.split, Layer.CITED)
            similarity.append(("BC", mode.value, gamma, _safe_nmi(citing, parts[bc_tag]), baseline))
            similarity.append(("CC", mode.value, gamma, _safe_nmi(cited, parts[cc_tag]), baseline))
            if mode is NormalizationMode.OUT:
                parts[method_tag(mode, Layer.CITING)] = citing
            elif mode is NormalizationMode.IN:
                parts[method_tag(mode, Layer.CITED)] = cited

        for method, p in parts.items():
            grain.append((method, gamma, granularity(p), p.cluster_count, p.singleton_count()))
            if labels is not None:
                reference = label_partition(labels, p.ids)
                if reference.node_count == 0:
                    raise ValueError(f"labels cover no node clustered by {method}")
                accuracy.append((method, gamma, granularity(p), p.cluster_count, _safe_nmi(p, reference)))
                curve_runs.setdefault(method, []).append((p, reference))
        logger.info("comparison gamma=%s done", format_gamma(gamma))

    def frame(rows, columns, keys):
        return pd.DataFrame(rows, columns=columns).sort_values(keys, kind="mergesort").reset_index(drop=True)

    report = ComparisonReport(
        similarity=frame(similarity, SIMILARITY_COLUMNS, ["target", "norm", "gamma"]),
        granularity=frame(grain, GRANULARITY_COLUMNS, ["method", "gamma"]),
        stages=_stage_frame(networks),
        accuracy=frame(accuracy, ACCURACY_COLUMNS, ["method", "gamma"]) if labels is not None else None,
    )
    report.curves = {method: nmi_vs_granularity_curve(runs) for method, runs in sorted(curve_runs.items())}
    for method, share in report.nmi_trend().items():
        if not np.isnan(share):
            logger.info("nmi-vs-granularity trend %s: %.0f%% rising steps", method, 100 * share)
    return report

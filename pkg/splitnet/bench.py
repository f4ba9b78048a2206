"""Construction-cost benchmark: node split against bibliographic coupling + co-citation."""

from __future__ import annotations

import logging
import statistics
import time
from typing import Callable, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd

from .constants import BENCH_MEAN_REFERENCES, BENCH_REPEATS, BENCH_WARMUP
from .coupling import bibliographic_coupling, co_citation
from .nodesplit import split
from .synth import random_citation_dag

logger = logging.getLogger(__name__)

T = TypeVar("T")

BENCH_COLUMNS = [
    "edges",
    "nodes",
    "split_ms",
    "coupling_ms",
    "split_edges",
    "bc_edges",
    "cc_edges",
    "coupling_edges",
]


def time_call(fn: Callable[[], T], warmup: int = BENCH_WARMUP, repeats: int = BENCH_REPEATS) -> Tuple[float, T]:
    """Median wall time in milliseconds over `repeats` runs, after `warmup` discarded runs."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    for _ in range(warmup):
        fn()
    samples = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        samples.append((time.perf_counter() - t0) * 1000.0)
    return statistics.median(samples), result


def run_bench(
    scales: Sequence[int],
    seed: int,
    mean_references: int = BENCH_MEAN_REFERENCES,
    warmup: int = BENCH_WARMUP,
    repeats: int = BENCH_REPEATS,
) -> pd.DataFrame:
    if not scales:
        raise ValueError("scales must be non-empty")
    rows = []
    for scale in scales:
        # one generator per scale so each row is reproducible on its own
        g = random_citation_dag(int(scale), np.random.default_rng([seed, int(scale)]), mean_references)
        split_ms, sg = time_call(lambda: split(g), warmup, repeats)
        coupling_ms, (bc, cc) = time_call(lambda: (bibliographic_coupling(g), co_citation(g)), warmup, repeats)
        rows.append(
            {
                "edges": g.edge_count,
                "nodes": g.node_count,
                "split_ms": split_ms,
                "coupling_ms": coupling_ms,
                "split_edges": sg.edge_count,
                "bc_edges": bc.edge_count,
                "cc_edges": cc.edge_count,
                "coupling_edges": bc.edge_count + cc.edge_count,
            }
        )
        logger.info(
            "bench edges=%d: split %.2f ms (%d edges), coupling %.2f ms (%d edges)",
            g.edge_count,
            split_ms,
            sg.edge_count,
            coupling_ms,
            bc.edge_count + cc.edge_count,
        )
    return pd.DataFrame(rows, columns=BENCH_COLUMNS)

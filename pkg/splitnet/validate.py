"""Pipeline configuration validation."""

from __future__ import annotations

from typing import List

from .config import PipelineConfig
from .constants import MAX_SEED, METHODS, RELATEDNESS_NORMS, SPLIT_NORMS


class ValidationError(Exception):
    """Raised when a pipeline configuration fails validation."""


def validate_config(cfg: PipelineConfig, require_input: bool = True) -> List[str]:
    errors: List[str] = []

    def err(msg: str) -> None:
        errors.append(msg)

    for key in sorted(cfg.extra):
        err(f"Unknown pipeline key: {key}")

    if cfg.method not in METHODS:
        err(f"method must be one of {', '.join(METHODS)}")
    else:
        norm = cfg.norm
        if cfg.method == "Split":
            if norm not in SPLIT_NORMS:
                err(f"normalization {norm!r} is not valid for Split (use raw, outnorm, innorm or binorm)")
        elif norm not in RELATEDNESS_NORMS:
            err(f"normalization {norm!r} is not valid for {cfg.method} (use eq1 or none)")

    if isinstance(cfg.top_m, bool) or not isinstance(cfg.top_m, int) or cfg.top_m < 1:
        err("top_m must be an integer >= 1")

    gammas = list(cfg.gammas or ())
    if not gammas:
        err("gammas must be a non-empty list")
    elif any(not isinstance(g, (int, float)) or not g > 0 for g in gammas):
        err("gammas must be positive numbers")
    elif gammas != sorted(gammas):
        err("gammas must be sorted ascending")

    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or not 0 <= cfg.seed <= MAX_SEED:
        err("seed must be an unsigned 64-bit integer")
    if isinstance(cfg.max_iterations, bool) or not isinstance(cfg.max_iterations, int) or cfg.max_iterations < 1:
        err("max_iterations must be an integer >= 1")
    if not isinstance(cfg.quality_epsilon, (int, float)) or not cfg.quality_epsilon > 0:
        err("quality_epsilon must be > 0")
    if isinstance(cfg.workers, bool) or not isinstance(cfg.workers, int) or cfg.workers < 1:
        err("workers must be an integer >= 1")

    if require_input:
        if cfg.input_path is None:
            err("input_path is required")
        elif not cfg.input_path.exists():
            err(f"input_path does not exist: {cfg.input_path}")
    if cfg.allow_list is not None and not cfg.allow_list.exists():
        err(f"allow_list does not exist: {cfg.allow_list}")
    return errors


def raise_on_errors(errors: List[str]) -> None:
    if errors:
        raise ValidationError("\n".join(errors))

"""Pipeline configuration: dataclass, TOML loading and snapshotting."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import tomli_w

from .constants import (
    DEFAULT_GAMMAS,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_QUALITY_EPSILON,
    DEFAULT_RELATEDNESS_NORM,
    DEFAULT_SEED,
    DEFAULT_SPLIT_NORM,
    DEFAULT_TOP_M,
)
from .leiden import LeidenParams


def _load_toml_bytes(data: bytes) -> Dict[str, Any]:
    try:
        import tomllib  # Python 3.11+
    except ImportError:  # pragma: no cover
        import tomli as tomllib  # type: ignore
    return tomllib.loads(data.decode("utf-8"))


@dataclass
class PipelineConfig:
    input_path: Optional[Path] = None
    method: str = "Split"
    normalization: Optional[str] = None
    top_m: int = DEFAULT_TOP_M
    gammas: Tuple[float, ...] = DEFAULT_GAMMAS
    seed: int = DEFAULT_SEED
    gcc_only: bool = True
    output_dir: Optional[Path] = None
    allow_list: Optional[Path] = None
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    quality_epsilon: float = DEFAULT_QUALITY_EPSILON
    record_timings: bool = False
    workers: int = 1
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def norm(self) -> str:
        """Normalization with the method default applied."""
        if self.normalization:
            return self.normalization.lower()
        return DEFAULT_SPLIT_NORM if self.method == "Split" else DEFAULT_RELATEDNESS_NORM

    def leiden_params(self) -> LeidenParams:
        return LeidenParams(
            seed=self.seed,
            max_iterations=self.max_iterations,
            quality_epsilon=self.quality_epsilon,
        )

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for f in fields(self):
            if f.name == "extra":
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            elif f.name == "seed" and value > (1 << 63) - 1:
                value = str(value)
            out[f.name] = value
        out["normalization"] = self.norm
        return out


_PATH_KEYS = {"input_path", "output_dir", "allow_list"}


def config_from_mapping(data: Mapping[str, Any], base: Optional[PipelineConfig] = None) -> PipelineConfig:
    cfg = base or PipelineConfig()
    known = {f.name for f in fields(PipelineConfig)} - {"extra"}
    for key, value in data.items():
        if key not in known:
            cfg.extra[key] = value
            continue
        if key in _PATH_KEYS and value is not None:
            value = Path(value)
        elif key == "gammas" and value is not None:
            value = tuple(float(x) for x in value)
        elif key == "seed" and isinstance(value, str):
            # seeds above the TOML int64 range are stored as strings
            value = int(value, 0)
        setattr(cfg, key, value)
    return cfg


def load_config(path: str | Path) -> PipelineConfig:
    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Config not found: {config_path}")
    data = _load_toml_bytes(config_path.read_bytes())
    table = data.get("pipeline", data)
    if not isinstance(table, dict):
        raise ValueError("[pipeline] must be a table")
    cfg = config_from_mapping(table)
    # relative paths resolve against the config file
    for key in _PATH_KEYS:
        value = getattr(cfg, key)
        if isinstance(value, Path) and not value.is_absolute():
            setattr(cfg, key, config_path.parent / value)
    return cfg


def write_config_snapshot(path: Path, cfg: PipelineConfig) -> None:
    snapshot = cfg.to_dict()
    # output_dir is where the snapshot lives; keeping it would tie the tree to its location
    snapshot.pop("output_dir", None)
    Path(path).write_text(tomli_w.dumps({"pipeline": snapshot}), encoding="utf-8")

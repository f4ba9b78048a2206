"""Run-directory bookkeeping: JSON reports and the sha256 file manifest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List

from .graph import ContractViolation

MANIFEST_NAME = "manifest.json"
REPORT_NAME = "report.json"


def _sha256_file(path: Path) -> str:
    hasher = hashlib.sha256()
    with path.open("rb") as handle:
        while True:
            chunk = handle.read(1024 * 1024)
            if not chunk:
                break
            hasher.update(chunk)
    return f"sha256:{hasher.hexdigest()}"


def write_json(path: Path, payload: Any) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_manifest(run_dir: Path) -> Dict[str, str]:
    """Hash every file under run_dir (except the manifest) into manifest.json."""
    run_dir = Path(run_dir)
    entries: Dict[str, str] = {}
    for path in sorted(run_dir.rglob("*")):
        if not path.is_file() or path.name == MANIFEST_NAME:
            continue
        entries[path.relative_to(run_dir).as_posix()] = _sha256_file(path)
    write_json(run_dir / MANIFEST_NAME, {"files": entries})
    return entries


@dataclass
class RunEntry:
    method: str
    gamma: float
    cluster_count: int
    granularity: float
    quality: float
    singletons: int
    nodes: int
    edges: int
    partition_file: str
    wall_time_ms: float | None = None


@dataclass
class RunReport:
    entries: List[RunEntry] = field(default_factory=list)
    stages: List[Dict[str, Any]] = field(default_factory=list)
    comparisons: List[Dict[str, Any]] = field(default_factory=list)

    def check_files(self, run_dir: Path) -> None:
        for entry in self.entries:
            if not (Path(run_dir) / entry.partition_file).exists():
                raise ContractViolation(f"report references missing partition file {entry.partition_file}")

    def to_dict(self, record_timings: bool) -> Dict[str, Any]:
        entries = []
        for entry in self.entries:
            row = asdict(entry)
            row["granularity"] = float(f"{entry.granularity:.12g}")
            row["quality"] = float(f"{entry.quality:.12g}")
            if record_timings and entry.wall_time_ms is not None:
                row["wall_time_ms"] = round(entry.wall_time_ms, 3)
            else:
                row.pop("wall_time_ms")
            entries.append(row)
        return {"entries": entries, "stages": self.stages, "comparisons": self.comparisons}

    def write(self, run_dir: Path, record_timings: bool = False) -> Path:
        self.check_files(run_dir)
        path = Path(run_dir) / REPORT_NAME
        write_json(path, self.to_dict(record_timings))
        return path


def refresh_manifest(path: Path) -> bool:
    """Rehash the run directory holding `path` if it already carries a manifest."""
    run_dir = Path(path).parent
    if not (run_dir / MANIFEST_NAME).exists():
        return False
    write_manifest(run_dir)
    return True


def append_comparison(run_dir: Path, row: Dict[str, Any]) -> None:
    path = Path(run_dir) / REPORT_NAME
    if path.exists():
        payload = json.loads(path.read_text(encoding="utf-8"))
    else:
        payload = RunReport().to_dict(record_timings=False)
    entry = {k: float(f"{v:.12g}") if isinstance(v, float) else v for k, v in row.items()}
    payload.setdefault("comparisons", []).append(entry)
    write_json(path, payload)

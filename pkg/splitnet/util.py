"""Utility helpers for splitnet."""

from __future__ import annotations

from typing import Iterable, List


_FNV64_OFFSET = 0xCBF2_9CE4_8422_2325
_FNV64_PRIME = 0x0000_0100_0000_01B3


def fnv1a64(data: bytes) -> int:
    h = _FNV64_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV64_PRIME) & 0xFFFF_FFFF_FFFF_FFFF
    return h


def canonical_id_hash(ids: Iterable[str]) -> int:
    """Order-independent hash of a node id set (ids are sorted first)."""
    payload = "\n".join(sorted(ids)).encode("utf-8")
    return fnv1a64(payload)


def parse_gammas(text: str) -> List[float]:
    """Parse `0.5,1,1.5` or a range `0.1:2.0:0.1` (start:stop:step, inclusive)."""
    text = text.strip()
    if not text:
        raise ValueError("gamma list is empty")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("gamma range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("gamma step must be > 0")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def format_gamma(gamma: float) -> str:
    return f"{gamma:g}"

"""Process-wide knobs: memory cap and kernel selection.

DEMONIC_MEM_MB caps the derivation-cube allocation (default 4096 MiB).
DEMONIC_KERNEL picks the fixpoint engine: "compiled", "python" or "auto".
Explicit function arguments always win over the environment.
"""

from __future__ import annotations

import os

DEFAULT_MEM_MB = 4096

__all__ = ["DEFAULT_MEM_MB", "mem_cap_bytes", "kernel_preference"]


def mem_cap_bytes(mem_mb: int | None = None) -> int:
    if mem_mb is None:
        raw = os.environ.get("DEMONIC_MEM_MB", "")
        try:
            mem_mb = int(raw) if raw else DEFAULT_MEM_MB
        except ValueError:
            mem_mb = DEFAULT_MEM_MB
    return int(mem_mb) * 2**20


def kernel_preference(engine: str | None = None) -> str:
    if engine is None:
        engine = os.environ.get("DEMONIC_KERNEL", "auto")
    engine = engine.lower()
    if engine not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown kernel preference: {engine!r}")
    return engine

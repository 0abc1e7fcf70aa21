"""Kernel backend selection: compiled extension when built, numpy fallback otherwise.

Set DESTAKE_KERNEL=py or DESTAKE_KERNEL=c to force a backend; both produce
bit-identical results, so the choice only affects speed.
"""

from __future__ import annotations

import os

from ._pivot_py import pivot_counts as pivot_counts_py

try:
    from ._pivot_c import pivot_counts as pivot_counts_c
except ImportError:
    pivot_counts_c = None

_forced = os.environ.get("DESTAKE_KERNEL", "").strip().lower()
if _forced not in ("", "c", "py"):
    raise ValueError(f"DESTAKE_KERNEL must be 'c' or 'py', got {_forced!r}")
if _forced == "c" and pivot_counts_c is None:
    raise ImportError("DESTAKE_KERNEL=c requested but the compiled kernel is not built")

if _forced == "py" or pivot_counts_c is None:
    backend = "python"
    pivot_counts = pivot_counts_py
else:
    backend = "c"
    pivot_counts = pivot_counts_c

__all__ = ["backend", "pivot_counts", "pivot_counts_c", "pivot_counts_py"]

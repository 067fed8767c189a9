"""Kernel backend selection.

The compiled extension is used when it imports; set ``DISCRIM_PURE_PYTHON=1``
to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _fallback

NAME = "python"
bootstrap_sums = _fallback.bootstrap_sums
best_split = _fallback.best_split

if os.environ.get("DISCRIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels
    except ImportError:
        _kernels = None
    if _kernels is not None:
        NAME = "compiled"
        bootstrap_sums = _kernels.bootstrap_sums
        best_split = _kernels.best_split

_MASK64 = (1 << 64) - 1


def stream_key(seed: int) -> int:
    """64-bit stream key for a user seed (splitmix64 of the seed)."""
    z = (int(seed) + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def backends() -> dict:
    """All importable backends by name, for benchmarks and parity tests."""
    out = {"python": _fallback}
    try:
        from . import _kernels as k
    except ImportError:
        return out
    out["compiled"] = k
    return out

"""Backend selection: compiled extension if importable, numpy fallback else.

Set MEMHEAT_FORCE_FALLBACK=1 to force the pure-python loops (used by the
benchmark and parity tests).
"""
from __future__ import annotations

import os

from . import _cq_fallback

try:
    from . import _cq_core
except ImportError:  # extension not built; speed only, no functionality lost
    _cq_core = None

HAVE_COMPILED = _cq_core is not None


def get_backend(name: str = "auto"):
    """Return the stepping-loop module for `name` in {auto, cython, python}."""
    if name == "python":
        return _cq_fallback
    if name == "cython":
        if _cq_core is None:
            raise RuntimeError("compiled core not available; rebuild or use 'python'")
        return _cq_core
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    if os.environ.get("MEMHEAT_FORCE_FALLBACK") == "1" or _cq_core is None:
        return _cq_fallback
    return _cq_core

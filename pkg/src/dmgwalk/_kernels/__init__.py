"""Reachability kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it imports; set ``DMGWALK_PURE=1`` to force
the reference implementation.
"""
import os

from . import _pure

try:
    if os.environ.get("DMGWALK_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _fast
except ImportError:
    _fast = None

_impl = _fast if _fast is not None else _pure

BACKEND = _impl.BACKEND
mixed_reach = _impl.mixed_reach
trek_reach = _impl.trek_reach
walk_reach = _impl.walk_reach
ancestral_path = _impl.ancestral_path

__all__ = ["BACKEND", "mixed_reach", "trek_reach", "walk_reach", "ancestral_path"]

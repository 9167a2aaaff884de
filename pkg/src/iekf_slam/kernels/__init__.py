"""Correspondence-search kernels.

The compiled extension is preferred when present; setting the environment
variable ``IEKF_SLAM_PURE_PYTHON=1`` forces the numpy fallback. Both
implementations are exact and produce identical results.
"""

import os

from . import _fallback

if os.environ.get("IEKF_SLAM_PURE_PYTHON", "0") == "1":
    _impl = _fallback
    BACKEND = "fallback"
else:
    try:
        from . import _native as _impl

        BACKEND = "native"
    except ImportError:
        _impl = _fallback
        BACKEND = "fallback"

batch_nearest = _impl.batch_nearest

__all__ = ["BACKEND", "batch_nearest"]

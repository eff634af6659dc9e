"""Selects the trajectory propagation kernel at import time.

The compiled extension is used when it was built; set ``RINGCAV_KERNEL=python``
to force the NumPy fallback (``RINGCAV_KERNEL=compiled`` makes a missing
extension an error instead of a silent fallback).
"""

import os

from . import _mcwf_fallback

_choice = os.environ.get("RINGCAV_KERNEL", "auto").lower()

if _choice == "python":
    advance = _mcwf_fallback.advance
    BACKEND = "python"
else:
    try:
        from ._mcwf_kernel import advance
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        advance = _mcwf_fallback.advance
        BACKEND = "python"

fallback_advance = _mcwf_fallback.advance

__all__ = ["advance", "fallback_advance", "BACKEND"]

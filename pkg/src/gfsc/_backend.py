"""Kernel backend selection.

The compiled module is used when it imports cleanly.  Setting the
environment variable ``GFSC_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

if _compiled is not None and not os.environ.get("GFSC_PURE_PYTHON"):
    kernels = _compiled
    BACKEND = "compiled"
else:
    kernels = _fallback
    BACKEND = "python"

AVAILABLE = ("compiled", "python") if _compiled is not None else ("python",)


def resolve(name=None):
    """Return the kernel module for ``name`` (None means the default)."""
    if name is None:
        return kernels
    if name == "python":
        return _fallback
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")

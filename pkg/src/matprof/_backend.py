"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``MATPROF_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

try:
    if os.environ.get("MATPROF_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels
except ImportError:
    _kernels = None

kernels = _kernels if _kernels is not None else _fallback
BACKEND = "cython" if _kernels is not None else "python"


def get_kernels(name=None):
    """Return the kernel module ``"cython"``, ``"python"``, or the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _fallback
    if name == "cython":
        if _kernels is None:
            raise ImportError("compiled kernels are not available")
        return _kernels
    raise ValueError(f"unknown backend {name!r}")

"""Select the compute backend once at import.

The compiled extension (``glprop._kernels``) is preferred when it imported
cleanly; otherwise the NumPy fallback is used. ``GLPROP_BACKEND=python`` or
``GLPROP_BACKEND=compiled`` forces the choice (forcing ``compiled`` when the
extension is missing is an error, so CI can assert the build happened).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _ext
except ImportError:
    _ext = None

_forced = os.environ.get("GLPROP_BACKEND", "").strip().lower()
if _forced == "python":
    _active = _kernels_py
elif _forced == "compiled":
    if _ext is None:
        raise ImportError(
            "GLPROP_BACKEND=compiled but the glprop._kernels extension is not built"
        )
    _active = _ext
elif _forced:
    raise ValueError(f"GLPROP_BACKEND must be 'python' or 'compiled', got {_forced!r}")
else:
    _active = _ext if _ext is not None else _kernels_py

BACKEND_NAME: str = _active.BACKEND_NAME
pairwise_sq_distances = _active.pairwise_sq_distances
propagate_loop = _active.propagate_loop


def available_backends():
    """Names of the kernel implementations importable in this environment."""
    names = ["python"]
    if _ext is not None:
        names.append("compiled")
    return names

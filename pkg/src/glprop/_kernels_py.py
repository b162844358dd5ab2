"""Pure-NumPy implementations of the hot kernels.

Mirrors the compiled extension in ``_kernels.pyx``; the active module is
chosen once at import time by :mod:`glprop.backend`.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Rows processed per chunk when forming pairwise differences; bounds peak
# memory at roughly chunk * N * d floats.
_CHUNK = 256


def pairwise_sq_distances(x: np.ndarray) -> np.ndarray:
    """All-pairs squared Euclidean distances, computed from explicit
    coordinate differences (no dot-product trick, so small distances do not
    suffer cancellation)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    out = np.empty((n, n))
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        diff = x[start:stop, None, :] - x[None, :, :]
        out[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(out, 0.0)
    return out


def propagate_loop(
    y0: np.ndarray,
    w: np.ndarray,
    mix: np.ndarray,
    lam: np.ndarray,
    max_iterations: int,
    tolerance: float,
):
    """Iterate ``Y <- diag(1-lam) W Y mix + diag(lam) Y0`` until the Frobenius
    norm of the update drops below ``tolerance`` or the iteration cap hits.

    Returns ``(Y, iterations_run, converged, final_delta)`` with Y not yet
    row-normalized.
    """
    keep = lam[:, None] * y0
    decay = (1.0 - lam)[:, None]
    y = y0.copy()
    delta = np.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iterations + 1):
        y_next = decay * (w @ y) @ mix + keep
        delta = float(np.linalg.norm(y_next - y))
        y = y_next
        if delta < tolerance:
            converged = True
            break
    return y, iterations, converged, delta

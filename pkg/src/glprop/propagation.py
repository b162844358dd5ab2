"""Group-constrained label propagation.

The iteration is

    Y_{t+1} = diag(1 - lam) . W . Y_t . M + diag(lam) . Y_0

where W is the row-stochastic image similarity, lam holds the per-image
anchor weights, and M redistributes mass between categories. M is derived
from the column-stochastic category affinity G by reading G's column j as
the outgoing mass distribution of category j, i.e. M = G^T. Applied this
way the category mixing conserves each image's total probability mass, so
row-stochastic inputs stay row-stochastic throughout the iteration (a flat
right-multiplication by a column-stochastic matrix would not conserve it).

Plain label propagation is the same update with G the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DimensionMismatch, InvalidConfig, SingularSystem
from .model import normalize_rows, validate_label_matrix

MODE_GLP = "glp"
MODE_LP = "lp"

# Condition-number ceiling beyond which a Neumann-series solve is treated
# as singular (column-stochastic G sits exactly on this degeneracy).
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class PropagationConfig:
    max_iterations: int = 100
    tolerance: float = 1e-9
    mode: str = MODE_GLP

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidConfig(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.tolerance > 0:
            raise InvalidConfig(f"tolerance must be positive, got {self.tolerance}")
        if self.mode not in (MODE_GLP, MODE_LP):
            raise InvalidConfig(f"mode must be {MODE_GLP!r} or {MODE_LP!r}, got {self.mode!r}")


@dataclass(frozen=True)
class PropagationResult:
    y_final: np.ndarray
    iterations_run: int
    converged: bool
    final_delta: float


def compute_lambda(y0) -> np.ndarray:
    """Per-image anchor weights: row maximum divided by row sum of the
    initial predictions. One-hot rows anchor fully (weight 1)."""
    y0 = validate_label_matrix(y0)
    return y0.max(axis=1) / y0.sum(axis=1)


def _check_shapes(yt, y0, w, g, lam):
    n, k = y0.shape
    if yt.shape != (n, k):
        raise DimensionMismatch(f"Y_t shape {yt.shape} != Y_0 shape {(n, k)}")
    if w.shape != (n, n):
        raise DimensionMismatch(f"W shape {w.shape}, expected {(n, n)}")
    if g.shape != (k, k):
        raise DimensionMismatch(f"G shape {g.shape}, expected {(k, k)}")
    if lam.shape != (n,):
        raise DimensionMismatch(f"lambda shape {lam.shape}, expected {(n,)}")


def propagate_step(yt, y0, w, g, lam) -> np.ndarray:
    """One update of the iteration (double precision, entries stay >= 0)."""
    yt = np.atleast_2d(np.asarray(yt, dtype=np.float64))
    y0 = np.atleast_2d(np.asarray(y0, dtype=np.float64))
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    g = np.atleast_2d(np.asarray(g, dtype=np.float64))
    lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    _check_shapes(yt, y0, w, g, lam)
    return (1.0 - lam)[:, None] * (w @ yt) @ g.T + lam[:, None] * y0


def propagate(y0, w, g=None, config: PropagationConfig | None = None) -> PropagationResult:
    """Run the iteration from Y_0 until the Frobenius norm of the update
    falls below ``config.tolerance`` or ``config.max_iterations`` is hit,
    then row-normalize the result.

    In LP mode ``g`` is ignored and the identity is used; callers invoking
    GLP mode with an explicit identity get bit-identical results.
    """
    config = config or PropagationConfig()
    y0 = validate_label_matrix(y0)
    n, k = y0.shape
    w = np.ascontiguousarray(np.atleast_2d(np.asarray(w, dtype=np.float64)))
    if config.mode == MODE_LP or g is None:
        g = np.eye(k)
    g = np.atleast_2d(np.asarray(g, dtype=np.float64))
    lam = y0.max(axis=1) / y0.sum(axis=1)
    _check_shapes(y0, y0, w, g, lam)

    mix = np.ascontiguousarray(g.T)
    y, iterations, converged, delta = backend.propagate_loop(
        np.ascontiguousarray(y0), w, mix, lam, config.max_iterations, config.tolerance
    )
    return PropagationResult(
        y_final=normalize_rows(y),
        iterations_run=iterations,
        converged=converged,
        final_delta=delta,
    )


def closed_form_partial_sum(y0, w, g, lam, t: int) -> np.ndarray:
    """Series form of the iterate after t+1 updates:

        ((1-L)W)^{t+1} Y0 M^{t+1} + sum_{i=0}^{t} ((1-L)W)^i L Y0 M^i

    evaluated by repeated multiplication (no eigendecomposition), with
    M = G^T as in the iteration. Serves as an independent oracle for
    ``propagate_step`` chains.
    """
    if t < 0:
        raise DimensionMismatch(f"t must be >= 0, got {t}")
    y0 = np.atleast_2d(np.asarray(y0, dtype=np.float64))
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    g = np.atleast_2d(np.asarray(g, dtype=np.float64))
    lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    _check_shapes(y0, y0, w, g, lam)

    mix = g.T
    decay = (1.0 - lam)[:, None]

    # partial sum: U_0 = L Y0, U_{i+1} = (1-L) W U_i M
    term = lam[:, None] * y0
    total = term.copy()
    for _ in range(t):
        term = decay * (w @ term) @ mix
        total += term

    # transient: T_0 = Y0, applied t+1 times
    transient = y0.copy()
    for _ in range(t + 1):
        transient = decay * (w @ transient) @ mix
    return transient + total


def element_wise_upper_bound(y0, w, g, lam) -> np.ndarray:
    """Element-wise bound on the converged iterate: the product of the two
    Neumann series sums

        (I - (1-L)W)^{-1} L Y0   and   (I - M)^{-1},

    which dominates sum_i ((1-L)W)^i L Y0 M^i entry by entry because all
    factors are nonnegative. Raises ``SingularSystem`` when either series
    does not converge (for instance when G is exactly column-stochastic, so
    the spectral radius of M is 1).
    """
    y0 = np.atleast_2d(np.asarray(y0, dtype=np.float64))
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    g = np.atleast_2d(np.asarray(g, dtype=np.float64))
    lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    _check_shapes(y0, y0, w, g, lam)
    n, k = y0.shape

    a = np.eye(n) - (1.0 - lam)[:, None] * w
    b = np.eye(k) - g.T
    for name, m in (("image system", a), ("category system", b)):
        cond = np.linalg.cond(m)
        if not np.isfinite(cond) or cond > _COND_LIMIT:
            raise SingularSystem(
                f"{name} is numerically singular (cond={cond:.3g}); the series sum diverges"
            )
    try:
        sum_a = np.linalg.solve(a, lam[:, None] * y0)
        sum_b = np.linalg.solve(b, np.eye(k))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return sum_a @ sum_b

"""Per-user interest distributions and smoothed ground truth."""

from __future__ import annotations

import numpy as np

from .errors import EmptyCollection, EmptyInput, NoGroundTruth, ZeroTotal
from .model import UserCollection


def aggregate_user_profile(y_user) -> np.ndarray:
    """Sum the per-image label distributions of one user's collection and
    normalize to a probability vector."""
    y_user = np.atleast_2d(np.asarray(y_user, dtype=np.float64))
    if y_user.shape[0] == 0:
        raise EmptyCollection("user has no images")
    totals = y_user.sum(axis=0)
    mass = totals.sum()
    if mass <= 0:
        raise ZeroTotal("user label mass is zero")
    return totals / mass


def prior_distribution(labels, k: int) -> np.ndarray:
    """Empirical category frequencies of a list of label indices."""
    labels = np.asarray(list(labels), dtype=np.int64)
    if labels.size == 0:
        raise EmptyInput("no labels to build a prior from")
    if labels.min() < 0 or labels.max() >= k:
        raise EmptyInput(f"label index out of range [0, {k})")
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return counts / counts.sum()


def board_distribution(user: UserCollection, k: int) -> np.ndarray:
    """Each labeled board contributes weight one to its category."""
    labels = [user.board_category[b] for b in user.boards()]
    if not labels:
        raise NoGroundTruth(f"user {user.user_id!r} has no labeled boards")
    counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=k).astype(np.float64)
    return counts / counts.sum()


def ground_truth_distribution(user: UserCollection, p0, alpha: float = 0.1) -> np.ndarray:
    """Board-count distribution smoothed with the global prior:
    p = normalize(p_boards + alpha * p0). The smoothing gives every category
    with prior mass a strictly positive truth value."""
    p0 = np.asarray(p0, dtype=np.float64)
    p = board_distribution(user, p0.shape[0]) + alpha * p0
    return p / p.sum()

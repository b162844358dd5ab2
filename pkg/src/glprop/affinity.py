"""Image-similarity matrix W and category-affinity matrix G.

W comes from a Gaussian kernel over deep-feature distances followed by row
normalization; G comes from the Jaccard index of category co-ownership
across users followed by column normalization.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import DegenerateBandwidth, DimensionMismatch, ZeroRowSum
from .model import FeatureMatrix, IncidenceRecord, UserCollection


def _as_features(x) -> np.ndarray:
    if isinstance(x, FeatureMatrix):
        return x.values
    return np.atleast_2d(np.asarray(x, dtype=np.float64))


def pairwise_sq_distances(x) -> np.ndarray:
    """N x N matrix of squared Euclidean distances between feature rows."""
    return backend.pairwise_sq_distances(_as_features(x))


def pairwise_distances_condensed(sq_distances: np.ndarray) -> np.ndarray:
    """Upper-triangle (i < j) Euclidean distances as a flat vector."""
    iu = np.triu_indices(sq_distances.shape[0], k=1)
    return np.sqrt(sq_distances[iu])


def kernel_bandwidth(x, sq_distances: np.ndarray | None = None) -> float:
    """Gaussian-kernel bandwidth: the population variance of the N(N-1)/2
    pairwise Euclidean distances between feature vectors.

    Pass ``sq_distances`` to reuse an already computed distance matrix.
    Raises ``DegenerateBandwidth`` when fewer than two images are given or
    when all pairwise distances coincide (zero variance).
    """
    feats = _as_features(x)
    if feats.shape[0] < 2:
        raise DegenerateBandwidth("bandwidth needs at least two images")
    if sq_distances is None:
        sq_distances = backend.pairwise_sq_distances(feats)
    dists = pairwise_distances_condensed(sq_distances)
    delta = float(np.var(dists))
    if delta <= 0.0:
        raise DegenerateBandwidth("all pairwise distances are identical")
    return delta


def gaussian_similarity(x, delta: float, sq_distances: np.ndarray | None = None) -> np.ndarray:
    """Unnormalized similarity W'(i,j) = exp(-||x_i - x_j||^2 / (2 delta^2)).

    Symmetric with unit diagonal; entries in (0, 1].
    """
    if not delta > 0.0:
        raise DegenerateBandwidth(f"bandwidth must be positive, got {delta}")
    if sq_distances is None:
        sq_distances = backend.pairwise_sq_distances(_as_features(x))
    return np.exp(sq_distances / (-2.0 * delta * delta))


def row_normalize(w_raw) -> np.ndarray:
    """Divide each row by its sum: W = D^-1 W'. Raises ``ZeroRowSum`` on a
    non-positive row sum (unreachable for kernel output, which has a unit
    diagonal)."""
    w_raw = np.atleast_2d(np.asarray(w_raw, dtype=np.float64))
    sums = w_raw.sum(axis=1)
    bad = sums <= 0
    if bad.any():
        raise ZeroRowSum(int(np.argmax(bad)))
    return w_raw / sums[:, None]


def similarity_matrix(x) -> np.ndarray:
    """Full W construction: squared distances -> bandwidth -> kernel -> row
    normalization. A single image yields the 1x1 identity."""
    feats = _as_features(x)
    if feats.shape[0] == 1:
        return np.ones((1, 1))
    sq = backend.pairwise_sq_distances(feats)
    delta = kernel_bandwidth(feats, sq_distances=sq)
    return row_normalize(gaussian_similarity(feats, delta, sq_distances=sq))


def jaccard_affinity(records, k: int) -> np.ndarray:
    """Raw K x K Jaccard matrix from per-user category ownership.

    Entry (i, j) is |users owning both i and j| / |users owning i or j|,
    taken as 0 when no user owns either. Diagonal entries are 1 for every
    category owned by at least one user.
    """
    if k < 1:
        raise DimensionMismatch(f"need k >= 1 categories, got {k}")
    owned = np.zeros((len(records), k), dtype=np.float64)
    for u, rec in enumerate(records):
        if isinstance(rec, IncidenceRecord):
            rec.validate(k)
            cats = rec.owned
        else:
            cats = {int(c) for c in rec}
            for c in cats:
                if not 0 <= c < k:
                    raise DimensionMismatch(f"category index {c} out of range [0, {k})")
        for c in cats:
            owned[u, c] = 1.0
    both = owned.T @ owned
    counts = owned.sum(axis=0)
    either = counts[:, None] + counts[None, :] - both
    out = np.zeros((k, k))
    np.divide(both, either, out=out, where=either > 0)
    return out


def column_normalize(g_raw) -> np.ndarray:
    """Scale each column to sum to 1. A zero column j becomes the identity
    column e_j so the result is always column-stochastic."""
    g = np.array(np.atleast_2d(g_raw), dtype=np.float64)
    if g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"category affinity must be square, got {g.shape}")
    sums = g.sum(axis=0)
    for j in np.nonzero(sums <= 0)[0]:
        g[:, j] = 0.0
        g[j, j] = 1.0
        sums[j] = 1.0
    return g / sums[None, :]


def category_affinity(records, k: int) -> np.ndarray:
    """Column-stochastic G from incidence records (Jaccard + normalization)."""
    return column_normalize(jaccard_affinity(records, k))


def group_distance_report(x, users) -> dict:
    """Per-category mean squared distances: images sharing a pinboard versus
    images sharing only the category (across boards, any user).

    Returns ``{category_index: {"within_board": float | None,
    "within_category": float | None, ...counts}}``; a value is None when no
    qualifying pair exists.
    """
    feats = x if isinstance(x, FeatureMatrix) else None
    if feats is None:
        raise DimensionMismatch("group_distance_report needs a FeatureMatrix with image ids")
    index_of = {img: i for i, img in enumerate(feats.image_ids)}

    # category -> list of (board_key, row_index)
    members: dict[int, list] = {}
    for user in users:
        if not isinstance(user, UserCollection):
            raise DimensionMismatch("users must be UserCollection instances")
        for img, board in user.board_of.items():
            cat = user.board_category[board]
            row = index_of.get(img)
            if row is None:
                continue
            members.setdefault(int(cat), []).append(((user.user_id, board), row))

    report = {}
    for cat, entries in sorted(members.items()):
        rows = np.array([r for _, r in entries])
        boards = [b for b, _ in entries]
        sq = backend.pairwise_sq_distances(feats.values[rows])
        same_board = np.array(
            [[boards[i] == boards[j] for j in range(len(boards))] for i in range(len(boards))]
        )
        iu = np.triu_indices(len(rows), k=1)
        within_mask = same_board[iu]
        within = sq[iu][within_mask]
        across = sq[iu][~within_mask]
        report[cat] = {
            "within_board": float(within.mean()) if within.size else None,
            "within_category": float(across.mean()) if across.size else None,
            "within_board_pairs": int(within.size),
            "within_category_pairs": int(across.size),
        }
    return report

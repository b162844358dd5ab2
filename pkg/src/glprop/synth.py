"""Seeded synthetic dataset generator.

Geometry: each category gets a cluster center, each board a sub-center near
its category center, each pin a feature vector near its board sub-center.
With board_spread < cluster_spread, images sharing a board are closer than
images merely sharing a category.

Users pick board categories with a tunable bias toward a primary category
and its companion category (categories are paired 0-1, 2-3, ...), so
co-ownership carries signal that the Jaccard affinity can pick up.

Initial predictions simulate a miscalibrated classifier: most pins are
correct but diluted, a slice is nearly clean (confident and right), and a
slice is confidently wrong, leaking toward a small set of per-user
confusion targets. ``prediction_noise`` scales the whole corruption; at 0
the predictions are exactly one-hot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import Dataset
from .errors import InvalidConfig
from .model import (
    DEFAULT_CATEGORIES,
    CategorySet,
    FeatureMatrix,
    IncidenceRecord,
    UserCollection,
)

# Feature-space scale. The Gaussian bandwidth is the variance of pairwise
# distances, which grows faster than the distances themselves, so the
# absolute scale controls how sharply the kernel separates categories.
_CENTER_SCALE = 0.5

# Classifier error mixture: fraction of nearly-clean pins, of diffusely
# corrupted pins (recoverable from neighbors), and of confidently wrong
# pins (anchored to a confusion target); the remainder to 1.0 is confident.
_FRAC_CLEAN = 0.25
_FRAC_DIFFUSE = 0.45
_CLEAN_MIX = 0.25          # max corruption of a clean pin
_DIFFUSE_MIX_LO = 0.8      # corruption range of a diffuse pin
_CONFIDENT_MIX_LO = 0.9    # corruption range of a confidently wrong pin
_DIFFUSE_LEAN = 3.0        # Dirichlet bias of diffuse noise toward the target
_CONFIDENT_WEIGHT = 0.85   # one-hot share of confidently wrong noise
_TARGETS_PER_USER = 3      # distinct confusion targets per user


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    num_categories: int = 8
    num_users: int = 30
    boards_per_user: tuple = (3, 6)
    pins_per_board: tuple = (10, 30)
    feature_dim: int = 12
    cluster_spread: float = 0.15
    board_spread: float = 0.05
    prediction_noise: float = 0.9
    category_correlation: float = 0.5
    incidence_users: int = 200

    def __post_init__(self):
        object.__setattr__(self, "boards_per_user", tuple(int(v) for v in self.boards_per_user))
        object.__setattr__(self, "pins_per_board", tuple(int(v) for v in self.pins_per_board))
        if self.num_categories < 2:
            raise InvalidConfig("need at least 2 categories")
        if self.num_users < 1:
            raise InvalidConfig("need at least 1 user")
        for name, rng in (("boards_per_user", self.boards_per_user), ("pins_per_board", self.pins_per_board)):
            if len(rng) != 2 or rng[0] < 1 or rng[1] < rng[0]:
                raise InvalidConfig(f"{name} must be (lo, hi) with 1 <= lo <= hi, got {rng}")
        if self.feature_dim < 1:
            raise InvalidConfig("feature_dim must be >= 1")
        if not (self.cluster_spread > 0 and self.board_spread > 0):
            raise InvalidConfig("spreads must be positive")
        if self.prediction_noise < 0:
            raise InvalidConfig("prediction_noise must be >= 0")
        if not 0.0 <= self.category_correlation <= 1.0:
            raise InvalidConfig("category_correlation must be in [0, 1]")
        if self.incidence_users < 0:
            raise InvalidConfig("incidence_users must be >= 0")


def _category_names(k: int) -> tuple:
    if k <= len(DEFAULT_CATEGORIES):
        return tuple(DEFAULT_CATEGORIES[:k])
    return tuple(DEFAULT_CATEGORIES) + tuple(
        f"Category {i:02d}" for i in range(len(DEFAULT_CATEGORIES), k)
    )


def _companion(c: int, k: int) -> int:
    other = c ^ 1
    return other if other < k else c


def _choose_board_categories(rng, k: int, boards: int, correlation: float):
    """Primary category half the time, its companion with probability
    correlation / 2, uniform otherwise."""
    primary = int(rng.integers(k))
    companion = _companion(primary, k)
    cats = []
    for _ in range(boards):
        draw = rng.random()
        if draw < 0.5:
            cats.append(primary)
        elif draw < 0.5 + 0.5 * correlation:
            cats.append(companion)
        else:
            cats.append(int(rng.integers(k)))
    return cats


def _noisy_prediction(rng, true_cat: int, target: int, noise: float, k: int) -> np.ndarray:
    slot = rng.random()
    spread = rng.random()
    if slot < _FRAC_CLEAN:
        mix = noise * _CLEAN_MIX * spread
        off = rng.dirichlet(np.ones(k))
    elif slot < _FRAC_CLEAN + _FRAC_DIFFUSE:
        mix = noise * (_DIFFUSE_MIX_LO + (1.0 - _DIFFUSE_MIX_LO) * spread)
        alpha = np.full(k, 0.9)
        alpha[target] += _DIFFUSE_LEAN
        off = rng.dirichlet(alpha)
    else:
        mix = noise * (_CONFIDENT_MIX_LO + (1.0 - _CONFIDENT_MIX_LO) * spread)
        off = _CONFIDENT_WEIGHT * np.eye(k)[target] + (1.0 - _CONFIDENT_WEIGHT) * rng.dirichlet(np.ones(k))
    row = mix * off
    row[true_cat] += 1.0 - mix
    return row / row.sum()


def synth_generate(config: SynthConfig) -> Dataset:
    """Generate a dataset deterministically from ``config.seed``: identical
    configs produce bit-identical datasets."""
    rng = np.random.default_rng(config.seed)
    k, d = config.num_categories, config.feature_dim
    b_lo, b_hi = config.boards_per_user
    p_lo, p_hi = config.pins_per_board
    centers = rng.normal(size=(k, d)) * _CENTER_SCALE

    image_ids, feats, y0_rows = [], [], []
    users = []
    for u in range(config.num_users):
        uid = f"u{u:03d}"
        boards = int(rng.integers(b_lo, b_hi + 1))
        board_cats = _choose_board_categories(rng, k, boards, config.category_correlation)
        owned = sorted(set(board_cats))
        unowned = [c for c in range(k) if c not in owned] or list(range(k))
        picks = rng.choice(unowned, size=min(_TARGETS_PER_USER, len(unowned)), replace=False)
        target_of = {c: int(picks[i % len(picks)]) for i, c in enumerate(owned)}

        user_images = []
        board_of = {}
        board_category = {}
        for b, cat in enumerate(board_cats):
            board_id = f"{uid}-b{b}"
            board_category[board_id] = cat
            sub_center = centers[cat] + rng.normal(size=d) * config.cluster_spread
            pins = int(rng.integers(p_lo, p_hi + 1))
            for p in range(pins):
                img = f"{uid}-b{b}-p{p:02d}"
                image_ids.append(img)
                user_images.append(img)
                board_of[img] = board_id
                feats.append(sub_center + rng.normal(size=d) * config.board_spread)
                y0_rows.append(
                    _noisy_prediction(rng, cat, target_of[cat], config.prediction_noise, k)
                )
        users.append(
            UserCollection(
                user_id=uid,
                image_ids=tuple(user_images),
                board_of=board_of,
                board_category=board_category,
            )
        )

    incidence = []
    for j in range(config.incidence_users):
        boards = int(rng.integers(b_lo, b_hi + 1))
        cats = _choose_board_categories(rng, k, boards, config.category_correlation)
        incidence.append(IncidenceRecord(user_id=f"t{j:03d}", owned=frozenset(cats)))

    return Dataset(
        categories=CategorySet(_category_names(k)),
        features=FeatureMatrix(values=np.asarray(feats), image_ids=tuple(image_ids)),
        initial_labels=np.asarray(y0_rows),
        users=tuple(users),
        incidence=tuple(incidence),
    )

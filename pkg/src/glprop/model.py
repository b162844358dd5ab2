"""Shared data types: category taxonomy, feature/label matrices, user collections.

All numeric containers hold float64 arrays that are frozen (non-writeable)
after construction, so instances can be shared across threads freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NonFinite,
    ZeroRow,
)

# The 34 pinboard categories offered by Pinterest, in fixed declaration order.
# Category index i refers to DEFAULT_CATEGORIES[i] everywhere in the system.
DEFAULT_CATEGORIES = (
    "Animals",
    "Architecture",
    "Art",
    "Cars & Motorcycles",
    "Celebrities",
    "Design",
    "DIY & Crafts",
    "Education",
    "Film, Music & Books",
    "Food & Drink",
    "Gardening",
    "Geek",
    "Hair & Beauty",
    "Health & Fitness",
    "History",
    "Holidays & Events",
    "Home Decor",
    "Humor",
    "Illustrations & Posters",
    "Kids",
    "Men's Fashion",
    "Outdoors",
    "Photography",
    "Products",
    "Quotes",
    "Science & Nature",
    "Sports",
    "Tattoos",
    "Technology",
    "Travel",
    "Weddings",
    "Women's Fashion",
    "Other",
)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CategorySet:
    """Ordered, unique category names. Declaration order fixes column order."""

    names: tuple

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 2:
            raise DimensionMismatch(f"need at least 2 categories, got {len(names)}")
        if len(set(names)) != len(names):
            raise DimensionMismatch("category names must be unique")

    @property
    def k(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown category {name!r}") from None

    @classmethod
    def default(cls) -> "CategorySet":
        return cls(DEFAULT_CATEGORIES)


@dataclass(frozen=True)
class FeatureMatrix:
    """N x d matrix of per-image feature vectors plus the image id order."""

    values: np.ndarray
    image_ids: tuple

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        ids = tuple(str(i) for i in self.image_ids)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DimensionMismatch(f"feature matrix must be N x d with N,d >= 1, got {values.shape}")
        if len(ids) != values.shape[0]:
            raise DimensionMismatch(
                f"{len(ids)} image ids for {values.shape[0]} feature rows"
            )
        if len(set(ids)) != len(ids):
            raise DimensionMismatch("image ids must be unique")
        bad = ~np.isfinite(values)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise NonFinite(int(r), int(c))
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "image_ids", ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class UserCollection:
    """One user's image ids plus optional board structure and board labels.

    ``board_of`` maps image id -> board id; ``board_category`` maps board
    id -> category index. Every board referenced by an image must carry a
    category entry, and every image with a board must be in ``image_ids``.
    """

    user_id: str
    image_ids: tuple
    board_of: dict = field(default_factory=dict)
    board_category: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = tuple(str(i) for i in self.image_ids)
        object.__setattr__(self, "image_ids", ids)
        known = set(ids)
        for img, board in self.board_of.items():
            if img not in known:
                raise DimensionMismatch(
                    f"user {self.user_id!r}: board member {img!r} not in image_ids"
                )
            if board not in self.board_category:
                raise DimensionMismatch(
                    f"user {self.user_id!r}: board {board!r} has no category label"
                )

    def boards(self) -> dict:
        """Board id -> list of image ids, in image order."""
        out = {}
        for img in self.image_ids:
            b = self.board_of.get(img)
            if b is not None:
                out.setdefault(b, []).append(img)
        return out


@dataclass(frozen=True)
class IncidenceRecord:
    """Categories a single user owns at least one board of."""

    user_id: str
    owned: frozenset

    def __post_init__(self):
        object.__setattr__(self, "owned", frozenset(int(c) for c in self.owned))

    def validate(self, k: int) -> None:
        for c in self.owned:
            if not 0 <= c < k:
                raise DimensionMismatch(
                    f"incidence record {self.user_id!r}: category index {c} out of range [0, {k})"
                )


def validate_label_matrix(y) -> np.ndarray:
    """Check a label matrix: finite, nonnegative, no zero rows.

    Returns the input as a float64 array; raises ``NonFinite``,
    ``NegativeEntry`` or ``ZeroRow`` naming the first offending entry.
    """
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.ndim != 2:
        raise DimensionMismatch(f"label matrix must be 2-D, got shape {y.shape}")
    bad = ~np.isfinite(y)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise NonFinite(int(r), int(c))
    neg = y < 0
    if neg.any():
        r, c = np.argwhere(neg)[0]
        raise NegativeEntry(int(r), int(c))
    sums = y.sum(axis=1)
    zero = sums <= 0
    if zero.any():
        raise ZeroRow(int(np.argmax(zero)))
    return y


def normalize_rows(y) -> np.ndarray:
    """Scale each row to sum to 1, preserving within-row ratios."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    sums = y.sum(axis=1)
    zero = sums <= 0
    if zero.any():
        raise ZeroRow(int(np.argmax(zero)))
    return y / sums[:, None]

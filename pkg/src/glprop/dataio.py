"""Dataset container and the on-disk formats.

A dataset directory holds:

    categories.csv    one category name per row (column ``category``);
                      optional, defaults to the built-in Pinterest taxonomy
    features.csv      image_id,f0,...,f{d-1}
    predictions.csv   image_id,p0,...,p{K-1}   (initial label distributions)
    structure.csv     user_id,board_id,image_id (board_id may be empty)
    board_labels.csv  board_id,category_name    (optional)
    incidence.csv     user_id,category_name     (optional; feeds G)

Category affinity matrices and evaluation reports are JSON keyed by
category names. Floats are written with ``repr`` so a save/load round trip
reproduces every value exactly.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import DanglingReference, DimensionMismatch, ParseError
from .model import (
    CategorySet,
    FeatureMatrix,
    IncidenceRecord,
    UserCollection,
    validate_label_matrix,
)

FEATURES_FILE = "features.csv"
PREDICTIONS_FILE = "predictions.csv"
STRUCTURE_FILE = "structure.csv"
BOARD_LABELS_FILE = "board_labels.csv"
CATEGORIES_FILE = "categories.csv"
INCIDENCE_FILE = "incidence.csv"


@dataclass(frozen=True)
class Dataset:
    categories: CategorySet
    features: FeatureMatrix
    initial_labels: np.ndarray
    users: tuple
    incidence: tuple = field(default=())

    def __post_init__(self):
        y0 = validate_label_matrix(self.initial_labels)
        if y0.shape != (self.features.n, self.categories.k):
            raise DimensionMismatch(
                f"initial labels shape {y0.shape}, expected "
                f"{(self.features.n, self.categories.k)}"
            )
        y0 = np.ascontiguousarray(y0)
        y0.flags.writeable = False
        object.__setattr__(self, "initial_labels", y0)
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "incidence", tuple(self.incidence))
        known = set(self.features.image_ids)
        seen = set()
        for user in self.users:
            for img in user.image_ids:
                if img not in known:
                    raise DanglingReference(img, f"user {user.user_id!r} references unknown image")
                if img in seen:
                    raise DanglingReference(img, "image assigned to more than one user")
                seen.add(img)
            for cat in user.board_category.values():
                if not 0 <= cat < self.categories.k:
                    raise DanglingReference(cat, f"user {user.user_id!r} has an invalid category index")
        for rec in self.incidence:
            rec.validate(self.categories.k)

    def user_rows(self, user: UserCollection) -> np.ndarray:
        """Row indices of one user's images in dataset order."""
        index_of = {img: i for i, img in enumerate(self.features.image_ids)}
        return np.array([index_of[img] for img in user.image_ids], dtype=np.int64)

    def inherited_labels(self) -> dict:
        """image_id -> category index, inherited from the image's board."""
        out = {}
        for user in self.users:
            for img, board in user.board_of.items():
                out[img] = user.board_category[board]
        return out

    def incidence_from_users(self) -> tuple:
        """Ownership records derived from the users' own labeled boards."""
        records = []
        for user in self.users:
            cats = frozenset(user.board_category[b] for b in user.boards())
            if cats:
                records.append(IncidenceRecord(user_id=user.user_id, owned=cats))
        return tuple(records)


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _rows_to_csv(header, rows) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _parse_float(path, line_no, token):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(path, line_no, f"not a number: {token!r}") from None
    if not np.isfinite(value):
        raise ParseError(path, line_no, f"non-finite value {token!r}")
    return value


def _read_csv(path):
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ParseError(path, 1, "empty file")
    return rows


def save_dataset(dataset: Dataset, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    d = dataset.features.dim
    k = dataset.categories.k

    _atomic_write(
        os.path.join(directory, CATEGORIES_FILE),
        _rows_to_csv(["category"], [[name] for name in dataset.categories.names]),
    )
    _atomic_write(
        os.path.join(directory, FEATURES_FILE),
        _rows_to_csv(
            ["image_id"] + [f"f{i}" for i in range(d)],
            [
                [img] + [repr(v) for v in row]
                for img, row in zip(dataset.features.image_ids, dataset.features.values)
            ],
        ),
    )
    _atomic_write(
        os.path.join(directory, PREDICTIONS_FILE),
        _rows_to_csv(
            ["image_id"] + [f"p{i}" for i in range(k)],
            [
                [img] + [repr(v) for v in row]
                for img, row in zip(dataset.features.image_ids, dataset.initial_labels)
            ],
        ),
    )
    structure_rows = []
    board_rows = []
    for user in dataset.users:
        for img in user.image_ids:
            structure_rows.append([user.user_id, user.board_of.get(img, ""), img])
        for board, cat in sorted(user.board_category.items()):
            board_rows.append([board, dataset.categories.names[cat]])
    _atomic_write(
        os.path.join(directory, STRUCTURE_FILE),
        _rows_to_csv(["user_id", "board_id", "image_id"], structure_rows),
    )
    if board_rows:
        _atomic_write(
            os.path.join(directory, BOARD_LABELS_FILE),
            _rows_to_csv(["board_id", "category_name"], board_rows),
        )
    if dataset.incidence:
        incidence_rows = [
            [rec.user_id, dataset.categories.names[c]]
            for rec in dataset.incidence
            for c in sorted(rec.owned)
        ]
        _atomic_write(
            os.path.join(directory, INCIDENCE_FILE),
            _rows_to_csv(["user_id", "category_name"], incidence_rows),
        )


def _load_categories(directory) -> CategorySet:
    path = os.path.join(directory, CATEGORIES_FILE)
    if not os.path.exists(path):
        return CategorySet.default()
    rows = _read_csv(path)
    if rows[0] != ["category"]:
        raise ParseError(path, 1, f"expected header ['category'], got {rows[0]}")
    names = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 1 or not row[0]:
            raise ParseError(path, line_no, "expected exactly one category name")
        names.append(row[0])
    return CategorySet(tuple(names))


def _load_matrix_csv(path, id_prefix_header):
    rows = _read_csv(path)
    header = rows[0]
    if not header or header[0] != "image_id":
        raise ParseError(path, 1, f"first column must be image_id, got {header[:1]}")
    width = len(header) - 1
    if width < 1:
        raise ParseError(path, 1, "no value columns")
    ids, values = [], []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != width + 1:
            raise ParseError(path, line_no, f"expected {width + 1} columns, got {len(row)}")
        if row[0] in set(ids):
            raise ParseError(path, line_no, f"duplicate image id {row[0]!r}")
        ids.append(row[0])
        values.append([_parse_float(path, line_no, tok) for tok in row[1:]])
    if not ids:
        raise ParseError(path, 2, "no data rows")
    return ids, np.asarray(values, dtype=np.float64)


def load_dataset(directory) -> Dataset:
    """Load and cross-validate a dataset directory. Boards inherit their
    category label onto every contained image (exposed via
    ``Dataset.inherited_labels``)."""
    categories = _load_categories(directory)

    feat_path = os.path.join(directory, FEATURES_FILE)
    ids, feats = _load_matrix_csv(feat_path, "image_id")
    features = FeatureMatrix(values=feats, image_ids=tuple(ids))

    pred_path = os.path.join(directory, PREDICTIONS_FILE)
    pred_ids, preds = _load_matrix_csv(pred_path, "image_id")
    if preds.shape[1] != categories.k:
        raise DimensionMismatch(
            f"{pred_path}: {preds.shape[1]} prediction columns for {categories.k} categories"
        )
    order = {img: i for i, img in enumerate(ids)}
    for img in pred_ids:
        if img not in order:
            raise DanglingReference(img, "prediction for unknown image")
    if len(pred_ids) != len(ids):
        missing = sorted(set(ids) - set(pred_ids))[0]
        raise DanglingReference(missing, "image has features but no prediction row")
    y0 = np.empty_like(preds)
    for row, img in enumerate(pred_ids):
        y0[order[img]] = preds[row]

    board_labels = {}
    labels_path = os.path.join(directory, BOARD_LABELS_FILE)
    if os.path.exists(labels_path):
        rows = _read_csv(labels_path)
        if rows[0] != ["board_id", "category_name"]:
            raise ParseError(labels_path, 1, f"bad header {rows[0]}")
        for line_no, row in enumerate(rows[1:], start=2):
            if len(row) != 2:
                raise ParseError(labels_path, line_no, "expected board_id,category_name")
            board, name = row
            try:
                cat = categories.index(name)
            except KeyError:
                raise DanglingReference(name, f"{labels_path}:{line_no}: unknown category") from None
            board_labels[board] = cat

    struct_path = os.path.join(directory, STRUCTURE_FILE)
    user_images: dict[str, list] = {}
    user_boards: dict[str, dict] = {}
    assigned = set()
    rows = _read_csv(struct_path)
    if rows[0] != ["user_id", "board_id", "image_id"]:
        raise ParseError(struct_path, 1, f"bad header {rows[0]}")
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ParseError(struct_path, line_no, "expected user_id,board_id,image_id")
        user, board, img = row
        if img not in order:
            raise DanglingReference(img, f"{struct_path}:{line_no}: unknown image")
        if img in assigned:
            raise ParseError(struct_path, line_no, f"image {img!r} listed twice")
        assigned.add(img)
        user_images.setdefault(user, []).append(img)
        if board:
            if board not in board_labels:
                raise DanglingReference(board, f"{struct_path}:{line_no}: board has no label")
            user_boards.setdefault(user, {})[img] = board

    users = []
    for user_id, images in user_images.items():
        board_of = user_boards.get(user_id, {})
        cats = {b: board_labels[b] for b in set(board_of.values())}
        users.append(
            UserCollection(
                user_id=user_id,
                image_ids=tuple(images),
                board_of=board_of,
                board_category=cats,
            )
        )

    incidence = []
    inc_path = os.path.join(directory, INCIDENCE_FILE)
    if os.path.exists(inc_path):
        rows = _read_csv(inc_path)
        if rows[0] != ["user_id", "category_name"]:
            raise ParseError(inc_path, 1, f"bad header {rows[0]}")
        owned: dict[str, set] = {}
        inc_order = []
        for line_no, row in enumerate(rows[1:], start=2):
            if len(row) != 2:
                raise ParseError(inc_path, line_no, "expected user_id,category_name")
            user, name = row
            try:
                cat = categories.index(name)
            except KeyError:
                raise DanglingReference(name, f"{inc_path}:{line_no}: unknown category") from None
            if user not in owned:
                owned[user] = set()
                inc_order.append(user)
            owned[user].add(cat)
        incidence = [
            IncidenceRecord(user_id=u, owned=frozenset(owned[u])) for u in inc_order
        ]

    return Dataset(
        categories=categories,
        features=features,
        initial_labels=y0,
        users=tuple(users),
        incidence=tuple(incidence),
    )


def save_affinity(g: np.ndarray, categories: CategorySet, path) -> None:
    """Write a category affinity matrix as JSON keyed by category names."""
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (categories.k, categories.k):
        raise DimensionMismatch(f"affinity shape {g.shape} for {categories.k} categories")
    payload = {
        "categories": list(categories.names),
        "matrix": {
            row_name: {
                col_name: g[i, j] for j, col_name in enumerate(categories.names)
            }
            for i, row_name in enumerate(categories.names)
        },
    }
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")


def load_affinity(path, categories: CategorySet | None = None):
    """Read an affinity JSON; returns ``(g, categories)`` with columns
    verified to sum to 1 within 1e-6."""
    with open(path) as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.msg) from exc
    try:
        names = tuple(payload["categories"])
        matrix = payload["matrix"]
    except (KeyError, TypeError) as exc:
        raise ParseError(path, 1, f"missing field: {exc}") from exc
    file_categories = CategorySet(names)
    if categories is not None and categories.names != file_categories.names:
        raise DimensionMismatch(
            f"{path}: affinity categories do not match the dataset's categories"
        )
    k = file_categories.k
    g = np.empty((k, k))
    for i, row_name in enumerate(names):
        try:
            row = matrix[row_name]
            for j, col_name in enumerate(names):
                g[i, j] = float(row[col_name])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, 1, f"bad matrix entry for {row_name!r}: {exc}") from exc
    sums = g.sum(axis=0)
    if np.abs(sums - 1.0).max() > 1e-6:
        raise ParseError(path, 1, f"columns must sum to 1, worst sum {sums[np.abs(sums - 1).argmax()]}")
    return g, file_categories

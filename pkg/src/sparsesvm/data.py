"""Dataset ingestion, feature transforms, design matrices, factorization, folds."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

__all__ = [
    "DataError",
    "ColumnTransform",
    "Dataset",
    "DesignMatrix",
    "ThinSVD",
    "FoldPlan",
    "load_csv",
    "apply_transform",
    "binarize",
    "thin_svd",
    "make_folds",
]


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class ColumnTransform:
    """Per-column affine map fitted on training features.

    ``scale`` holds the sample standard deviation (ddof=1) for the
    "standardized" kind and the column range for "minmax"; a zero marks a
    constant training column, which maps to zero on any input.
    """

    kind: str
    center: np.ndarray
    scale: np.ndarray

    def apply(self, features: np.ndarray) -> np.ndarray:
        X = np.asarray(features, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.center.size:
            raise DataError(
                f"expected {self.center.size} feature columns, got shape {X.shape}"
            )
        out = np.zeros_like(X)
        live = self.scale != 0
        out[:, live] = (X[:, live] - self.center[live]) / self.scale[live]
        return out


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with integer class ids indexing ``class_names``."""

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    transform: str = "none"
    transform_params: ColumnTransform | None = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(str(c) for c in self.class_names))
        if features.ndim != 2 or features.size == 0:
            raise DataError(f"feature matrix must be 2-d and non-empty, got shape {features.shape}")
        if labels.shape != (features.shape[0],):
            raise DataError("labels length does not match number of feature rows")
        if not np.all(np.isfinite(features)):
            raise DataError("feature matrix contains non-finite entries")
        if labels.min() < 0 or labels.max() >= len(self.class_names):
            raise DataError("label ids must index into class_names")
        if np.unique(labels).size < 2:
            raise DataError("fewer than 2 classes present")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def take(self, indices) -> "Dataset":
        """Row subset sharing class names and transform metadata."""
        idx = np.asarray(indices, dtype=int)
        return replace(self, features=self.features[idx], labels=self.labels[idx])


@dataclass(frozen=True)
class DesignMatrix:
    """Two-class design with a trailing all-ones intercept column and +/-1 labels."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or X.shape[1] < 2:
            raise DataError(f"design matrix needs at least one feature column, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError("label vector length does not match design rows")
        if not np.all(X[:, -1] == 1.0):
            raise DataError("last design column must be the intercept (all ones)")
        if not np.all(np.abs(y) == 1.0):
            raise DataError("labels must be +/-1")

    @classmethod
    def from_features(cls, features: np.ndarray, y: np.ndarray) -> "DesignMatrix":
        features = np.asarray(features, dtype=float)
        return cls(np.hstack([features, np.ones((features.shape[0], 1))]), y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1] - 1


@dataclass(frozen=True)
class ThinSVD:
    """Rank-truncated thin SVD, X ~= U @ diag(s) @ V.T."""

    U: np.ndarray
    s: np.ndarray
    V: np.ndarray

    @property
    def r(self) -> int:
        return self.s.size


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic assignment of each sample to one validation fold."""

    num_folds: int
    assignments: np.ndarray
    seed: int

    def val_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def to_json(self) -> str:
        return json.dumps(
            {
                "num_folds": int(self.num_folds),
                "seed": int(self.seed),
                "assignments": [int(a) for a in self.assignments],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FoldPlan":
        doc = json.loads(text)
        return cls(int(doc["num_folds"]), np.asarray(doc["assignments"], dtype=int), int(doc["seed"]))


def load_csv(path, label_column, has_header: bool = True) -> Dataset:
    """Read a comma-delimited UTF-8 file into a Dataset.

    ``label_column`` is a header name (requires ``has_header``) or a 0-based
    column index. Labels are factorized in first-appearance order; every other
    cell must parse as a finite float.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = None
    if has_header:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
        if not rows:
            raise DataError(f"{path}: no data rows")
    ncol = len(header) if header is not None else len(rows[0])

    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise DataError("label column given by name but the file has no header")
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not found in header {header}")
        label_idx = header.index(label_column)
    else:
        label_idx = int(label_column)
        if not -ncol <= label_idx < ncol:
            raise DataError(f"label column index {label_idx} out of range for {ncol} columns")
        label_idx %= ncol

    feats = []
    raw_labels = []
    for i, row in enumerate(rows, start=1):
        if len(row) != ncol:
            raise DataError(f"{path}: row {i} has {len(row)} cells, expected {ncol}")
        vals = []
        for j, cell in enumerate(row):
            cell = cell.strip()
            if j == label_idx:
                if not cell:
                    raise DataError(f"{path}: missing label at row {i}")
                raw_labels.append(cell)
                continue
            if not cell:
                raise DataError(f"{path}: missing value at row {i}, column {j}")
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: cannot parse {cell!r} as a number at row {i}, column {j}"
                ) from None
            if not np.isfinite(v):
                raise DataError(f"{path}: non-finite value at row {i}, column {j}")
            vals.append(v)
        feats.append(vals)

    names: list[str] = []
    index: dict[str, int] = {}
    ids = []
    for lab in raw_labels:
        if lab not in index:
            index[lab] = len(names)
            names.append(lab)
        ids.append(index[lab])
    if len(names) < 2:
        raise DataError(f"{path}: fewer than 2 classes in the label column")
    return Dataset(np.asarray(feats, dtype=float), np.asarray(ids, dtype=int), tuple(names))


def apply_transform(ds: Dataset, kind: str) -> Dataset:
    """Column-wise standardize or min-max scale. Constant columns map to zero.

    The fitted parameters are stored on the returned Dataset so held-out data
    can be pushed through ``transform_params.apply`` without refitting.
    """
    if ds.transform != "none":
        raise DataError(f"dataset already transformed ({ds.transform!r})")
    X = ds.features
    span = np.ptp(X, axis=0)
    if kind == "standardized":
        center = X.mean(axis=0)
        scale = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
        scale = np.where(span == 0, 0.0, scale)
    elif kind == "minmax":
        center = X.min(axis=0)
        scale = span
    elif kind == "none":
        return ds
    else:
        raise DataError(f"unknown transform {kind!r}")
    params = ColumnTransform(kind, center, scale)
    return replace(ds, features=params.apply(X), transform=kind, transform_params=params)


def binarize(ds: Dataset, positive_class: int, negative_class: int) -> DesignMatrix:
    """Rows of the two classes with labels mapped to +/-1 and an intercept column."""
    pos, neg = int(positive_class), int(negative_class)
    if pos == neg:
        raise DataError("positive and negative class must differ")
    for cid in (pos, neg):
        if not 0 <= cid < len(ds.class_names):
            raise DataError(f"class id {cid} out of range")
        if not np.any(ds.labels == cid):
            raise DataError(f"class {ds.class_names[cid]!r} has no samples")
    mask = (ds.labels == pos) | (ds.labels == neg)
    y = np.where(ds.labels[mask] == pos, 1.0, -1.0)
    return DesignMatrix.from_features(ds.features[mask], y)


def thin_svd(X: np.ndarray, rank_tol: float = 1e-12) -> ThinSVD:
    """Thin SVD keeping singular values above ``rank_tol`` relative to the largest."""
    X = np.asarray(X, dtype=float)
    try:
        U, s, Vh = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DataError(f"SVD failed to converge: {exc}") from exc
    if s.size == 0 or s[0] <= 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > rank_tol * s[0]))
    return ThinSVD(np.ascontiguousarray(U[:, :r]), s[:r].copy(), np.ascontiguousarray(Vh[:r].T))


def make_folds(n: int, num_folds: int, seed: int, labels=None) -> FoldPlan:
    """Balanced fold assignment, stratified by class when labels are given.

    Assignment deals shuffled samples to folds cyclically, carrying the cycle
    across classes so overall fold sizes differ by at most one.
    """
    if not 2 <= num_folds <= n:
        raise DataError(f"need 2 <= num_folds <= n, got num_folds={num_folds}, n={n}")
    rng = np.random.default_rng(seed)
    if labels is None:
        groups = [rng.permutation(n)]
    else:
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise DataError("labels length does not match n")
        groups = [rng.permutation(np.flatnonzero(labels == c)) for c in np.unique(labels)]
    assignments = np.empty(n, dtype=int)
    slot = 0
    for idx in groups:
        for i in idx:
            assignments[i] = slot % num_folds
            slot += 1
    return FoldPlan(int(num_folds), assignments, int(seed))

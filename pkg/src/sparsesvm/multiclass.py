"""One-versus-one training and voting on top of the annealed binary fits."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .anneal import prox_dist_fit
from .config import AnnealSchedule, FitReport, SolverConfig
from .data import Dataset, DesignMatrix, binarize
from .kernel import KernelModel, gram_matrix, kernel_design, kernel_predict, median_bandwidth
from .sparsity import SparsityConstraint

__all__ = ["GaussianKernelSpec", "PairClassifier", "OVOModel", "init_heuristic",
           "class_pairs", "train_ovo", "predict_ovo"]


@dataclass(frozen=True)
class GaussianKernelSpec:
    """Gaussian kernel request; ``gamma=None`` uses the median-distance default."""

    gamma: float | None = None

    def __post_init__(self):
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")


def init_heuristic(design: DesignMatrix) -> np.ndarray:
    """Cheap starting point: per-column simple regression slopes, label-mean intercept.

    Columns with zero variance get a zero slope.
    """
    X = design.X[:, :-1]
    y = design.y
    xc = X - X.mean(axis=0)
    denom = np.sum(xc * xc, axis=0)
    num = xc.T @ (y - y.mean())
    beta = np.zeros(design.X.shape[1])
    live = denom > 0
    beta[:-1][live] = num[live] / denom[live]
    beta[-1] = y.mean()
    return beta


def class_pairs(num_classes: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(num_classes) for j in range(i + 1, num_classes)]


@dataclass
class PairClassifier:
    """One direction of the vote: positive class wins on score >= 0."""

    positive: int
    negative: int
    coef: np.ndarray | None = None
    kernel: KernelModel | None = None
    report: FitReport | None = None

    def scores(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=float))
        if self.kernel is not None:
            return np.atleast_1d(kernel_predict(self.kernel, X))
        return X @ self.coef[:-1] + self.coef[-1]


@dataclass
class OVOModel:
    pairs: list[PairClassifier]
    class_names: tuple[str, ...]

    @property
    def num_classes(self) -> int:
        return len(self.class_names)


def _resolve_constraint(sparsity, p: int) -> SparsityConstraint:
    if isinstance(sparsity, SparsityConstraint):
        if sparsity.p != p:
            raise ValueError(f"constraint built for p={sparsity.p}, design has p={p}")
        return sparsity
    return SparsityConstraint.from_sparsity(float(sparsity), p)


def _fit_pair(ds, pos, neg, sparsity, solver, sched, cfg, kernel) -> PairClassifier:
    if kernel is None:
        design = binarize(ds, pos, neg)
        constraint = _resolve_constraint(sparsity, design.p)
        beta, report = prox_dist_fit(design, constraint, init_heuristic(design),
                                     solver=solver, sched=sched, cfg=cfg)
        return PairClassifier(pos, neg, coef=beta, report=report)
    mask = (ds.labels == pos) | (ds.labels == neg)
    feats = ds.features[mask]
    y = np.where(ds.labels[mask] == pos, 1.0, -1.0)
    gamma = kernel.gamma if kernel.gamma is not None else median_bandwidth(feats)
    design = kernel_design(gram_matrix(feats, gamma), y)
    constraint = _resolve_constraint(sparsity, design.p)
    alpha, report = prox_dist_fit(design, constraint, init_heuristic(design),
                                  solver=solver, sched=sched, cfg=cfg)
    model = KernelModel(alpha=alpha, gamma=gamma, train_features=feats, train_labels=y)
    return PairClassifier(pos, neg, kernel=model, report=report)


def train_ovo(ds: Dataset, sparsity, solver: str = "mm",
              sched: AnnealSchedule | None = None, cfg: SolverConfig | None = None,
              kernel: GaussianKernelSpec | None = None, n_threads: int = 1) -> OVOModel:
    """Fit one annealed classifier per unordered class pair.

    ``sparsity`` is either a SparsityConstraint (linear case) or a fraction in
    [0, 1); with a kernel the fraction applies to each pair's own sample count.
    """
    pairs = class_pairs(len(ds.class_names))

    def fit(pair):
        i, j = pair
        try:
            return _fit_pair(ds, i, j, sparsity, solver, sched, cfg, kernel)
        except Exception as exc:
            raise RuntimeError(
                f"fit failed for class pair ({ds.class_names[i]}, {ds.class_names[j]}): {exc}"
            ) from exc

    if n_threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            fitted = list(pool.map(fit, pairs))
    else:
        fitted = [fit(pair) for pair in pairs]
    return OVOModel(pairs=fitted, class_names=ds.class_names)


def predict_ovo(model: OVOModel, features):
    """Majority vote over pair classifiers; ties resolve to the lowest class id."""
    arr = np.asarray(features, dtype=float)
    X = np.atleast_2d(arr)
    votes = np.zeros((X.shape[0], model.num_classes), dtype=int)
    rows = np.arange(X.shape[0])
    for pair in model.pairs:
        s = pair.scores(X)
        votes[rows, np.where(s >= 0.0, pair.positive, pair.negative)] += 1
    ids = np.argmax(votes, axis=1)
    return int(ids[0]) if arr.ndim == 1 else ids

"""Gaussian-kernel classification through a labeled gram design.

The trick: build [K diag(y) | 1] and hand it to the linear machinery, whose
coefficient vector then holds dual weights (one per training sample) plus an
intercept. Sparsity applied to those weights bounds the number of retained
training samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DesignMatrix

__all__ = ["KernelModel", "gram_matrix", "kernel_design", "kernel_predict", "median_bandwidth"]


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    a2 = np.sum(A * A, axis=1)
    b2 = np.sum(B * B, axis=1)
    d2 = a2[:, None] + b2[None, :] - 2.0 * (A @ B.T)
    return np.maximum(d2, 0.0)


def gram_matrix(features: np.ndarray, gamma: float) -> np.ndarray:
    """K_ij = exp(-gamma ||x_i - x_j||^2), symmetric with unit diagonal."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    X = np.asarray(features, dtype=float)
    K = np.exp(-gamma * _sq_dists(X, X))
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


def median_bandwidth(features: np.ndarray) -> float:
    """Default bandwidth 1 / (p * median pairwise squared distance)."""
    X = np.asarray(features, dtype=float)
    iu = np.triu_indices(X.shape[0], k=1)
    med = float(np.median(_sq_dists(X, X)[iu])) if iu[0].size else 1.0
    if med <= 0.0:
        med = 1.0
    return 1.0 / (X.shape[1] * med)


def kernel_design(K: np.ndarray, y: np.ndarray) -> DesignMatrix:
    """Design [K diag(y) | 1]; its coefficient vector is dual weights + intercept."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if K.shape != (y.size, y.size):
        raise ValueError(f"gram matrix shape {K.shape} does not match {y.size} labels")
    return DesignMatrix(np.column_stack([K * y[None, :], np.ones(K.shape[0])]), y)


@dataclass(frozen=True)
class KernelModel:
    """Dual coefficients plus the training points needed to score new data."""

    alpha: np.ndarray
    gamma: float
    train_features: np.ndarray
    train_labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "train_features", np.asarray(self.train_features, dtype=float))
        object.__setattr__(self, "train_labels", np.asarray(self.train_labels, dtype=float))
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.alpha.shape != (self.train_features.shape[0] + 1,):
            raise ValueError("alpha must have one entry per training sample plus an intercept")
        if self.train_labels.shape != (self.train_features.shape[0],):
            raise ValueError("training labels do not match training features")

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.alpha[:-1]))


def kernel_predict(model: KernelModel, x) -> float | np.ndarray:
    """Decision score for one feature vector or a stack of them.

    score(x) = sum_j y_j alpha_j exp(-gamma ||x - x_j||^2) + intercept
    """
    arr = np.asarray(x, dtype=float)
    X = np.atleast_2d(arr)
    G = np.exp(-model.gamma * _sq_dists(X, model.train_features))
    scores = G @ (model.train_labels * model.alpha[:-1]) + model.alpha[-1]
    return scores if arr.ndim == 2 else float(scores[0])

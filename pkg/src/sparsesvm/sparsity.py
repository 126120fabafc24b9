"""Projection onto the k-sparse coefficient set; the intercept is exempt."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SparsityConstraint", "project", "sq_distance"]


@dataclass(frozen=True)
class SparsityConstraint:
    """Keep at most ``k`` of the ``p`` leading (non-intercept) coefficients."""

    k: int
    p: int

    def __post_init__(self):
        if not 0 <= self.k <= self.p:
            raise ValueError(f"need 0 <= k <= p, got k={self.k}, p={self.p}")

    @classmethod
    def from_sparsity(cls, s: float, p: int) -> "SparsityConstraint":
        """Constraint for a sparsity fraction s in [0, 1): k = round((1 - s) p)."""
        if not 0.0 <= s < 1.0:
            raise ValueError(f"sparsity fraction must lie in [0, 1), got {s}")
        return cls(int(round((1.0 - s) * p)), int(p))

    @property
    def sparsity(self) -> float:
        return 1.0 - self.k / self.p


def project(beta: np.ndarray, constraint: SparsityConstraint) -> np.ndarray:
    """Zero all but the k largest-magnitude entries among the first p coordinates.

    Anything past the first ``p`` entries (the intercept) passes through
    untouched. Magnitude ties at the selection boundary keep the lower index,
    making the output deterministic. Runs in O(p) expected time via partial
    selection.
    """
    beta = np.asarray(beta, dtype=float)
    k, p = constraint.k, constraint.p
    if k >= p:
        return beta.copy()
    out = np.zeros_like(beta)
    out[p:] = beta[p:]
    if k == 0:
        return out
    mags = np.abs(beta[:p])
    kth = np.partition(mags, p - k)[p - k]
    keep = np.flatnonzero(mags > kth)
    short = k - keep.size
    if short > 0:
        keep = np.concatenate([keep, np.flatnonzero(mags == kth)[:short]])
    out[keep] = beta[keep]
    return out


def sq_distance(beta: np.ndarray, constraint: SparsityConstraint) -> float:
    """Squared Euclidean distance from ``beta`` to the constraint set."""
    beta = np.asarray(beta, dtype=float)
    diff = beta - project(beta, constraint)
    return float(diff @ diff)

"""Squared-hinge loss, its distance-penalized form, and the quadratic majorizer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DesignMatrix
from .sparsity import SparsityConstraint, project, sq_distance

__all__ = [
    "PenaltyWeights",
    "ObjectiveState",
    "hinge_loss",
    "working_response",
    "gradient",
    "penalized_objective",
    "surrogate_value",
]


@dataclass(frozen=True)
class PenaltyWeights:
    """Block weights of the stacked least-squares surrogate.

    a2 = 1/n scales the loss block; b2 = rho / (p - k + 1) scales the
    distance block, so b2 vanishes exactly when rho does.
    """

    a2: float
    b2: float
    rho: float

    @classmethod
    def for_problem(cls, n: int, constraint: SparsityConstraint, rho: float) -> "PenaltyWeights":
        if n < 1:
            raise ValueError("n must be positive")
        if rho < 0:
            raise ValueError(f"rho must be nonnegative, got {rho}")
        return cls(a2=1.0 / n, b2=rho / (constraint.p - constraint.k + 1), rho=float(rho))


@dataclass
class ObjectiveState:
    """One evaluation of the penalized objective with cached margins."""

    margins: np.ndarray
    loss: float
    penalty: float
    objective: float
    grad: np.ndarray


def _loss_from_margins(margins: np.ndarray) -> float:
    slack = np.maximum(0.0, 1.0 - margins)
    return float(slack @ slack) / (2.0 * margins.size)


def _gradient_from_scores(beta, scores, design, constraint, weights) -> np.ndarray:
    # X^T v with v_i = -a2 * y_i * max(0, 1 - margin_i), plus the penalty pull
    v = -weights.a2 * design.y * np.maximum(0.0, 1.0 - design.y * scores)
    g = design.X.T @ v
    if weights.b2 != 0.0:
        g = g + weights.b2 * (beta - project(beta, constraint))
    return g


def _objective_from_scores(beta, scores, design, constraint, weights) -> float:
    val = _loss_from_margins(design.y * scores)
    if weights.b2 != 0.0:
        val += 0.5 * weights.b2 * sq_distance(beta, constraint)
    return val


def hinge_loss(beta: np.ndarray, design: DesignMatrix) -> float:
    """Averaged squared hinge: (1/2n) sum_i max(0, 1 - y_i x_i' beta)^2."""
    return _loss_from_margins(design.y * (design.X @ beta))


def working_response(beta: np.ndarray, design: DesignMatrix) -> np.ndarray:
    """Surrogate targets: the fitted score where the margin is met, else the label."""
    scores = design.X @ beta
    return np.where(design.y * scores >= 1.0, scores, design.y)


def gradient(beta, design: DesignMatrix, constraint: SparsityConstraint, weights: PenaltyWeights) -> np.ndarray:
    """Gradient of the penalized objective, defined wherever the projection is unique."""
    beta = np.asarray(beta, dtype=float)
    return _gradient_from_scores(beta, design.X @ beta, design, constraint, weights)


def penalized_objective(beta, design, constraint, weights) -> ObjectiveState:
    beta = np.asarray(beta, dtype=float)
    scores = design.X @ beta
    margins = design.y * scores
    loss = _loss_from_margins(margins)
    penalty = 0.5 * weights.b2 * sq_distance(beta, constraint) if weights.b2 != 0.0 else 0.0
    grad = _gradient_from_scores(beta, scores, design, constraint, weights)
    return ObjectiveState(margins=margins, loss=loss, penalty=penalty,
                          objective=loss + penalty, grad=grad)


def surrogate_value(beta, anchor, design, constraint, weights) -> float:
    """Anchored majorizer: 0.5 a2 ||z - X beta||^2 + 0.5 b2 ||p_m - beta||^2.

    z and p_m are the working response and projection at ``anchor``. Touches
    the true objective at the anchor and dominates it everywhere else.
    """
    beta = np.asarray(beta, dtype=float)
    z = working_response(anchor, design)
    pm = project(np.asarray(anchor, dtype=float), constraint)
    r_loss = z - design.X @ beta
    r_pen = pm - beta
    return 0.5 * weights.a2 * float(r_loss @ r_loss) + 0.5 * weights.b2 * float(r_pen @ r_pen)

"""Inner solvers for one penalty level: a closed-form factorization update and
exact-line-search steepest descent, sharing a restarted accelerated loop.

Both minimize the same anchored least-squares majorizer of the penalized
squared-hinge objective; the factorization route solves it exactly through a
thin SVD computed once per design, the descent route never touches the SVD.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import AccelPolicy, FitReport, SolverConfig
from .data import DesignMatrix, ThinSVD, thin_svd
from .objective import (
    PenaltyWeights,
    _gradient_from_scores,
    _objective_from_scores,
)
from .sparsity import SparsityConstraint, project, sq_distance

__all__ = [
    "MMWorkspace",
    "SDWorkspace",
    "mm_update",
    "mm_solve",
    "step_size",
    "sd_update",
    "sd_solve",
    "nesterov_step",
]


@dataclass
class MMWorkspace:
    """Thin SVD of the design, shared across penalty levels and sparsity levels,
    with per-singular-value update coefficients cached for the current weights."""

    svd: ThinSVD
    per_value_loop: bool = False
    _key: tuple | None = field(default=None, repr=False)
    _c1: np.ndarray | None = field(default=None, repr=False)
    _c2: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_design(cls, design: DesignMatrix, rank_tol: float = 1e-12,
                    per_value_loop: bool = False) -> "MMWorkspace":
        return cls(svd=thin_svd(design.X, rank_tol), per_value_loop=per_value_loop)

    def coefficients(self, weights: PenaltyWeights):
        """c1_j = a2 s_j / (a2 s_j^2 + b2), c2_j = a2 s_j^2 / (a2 s_j^2 + b2)."""
        key = (weights.a2, weights.b2)
        if self._key != key:
            s = self.svd.s
            denom = weights.a2 * s * s + weights.b2
            self._c1 = weights.a2 * s / denom
            self._c2 = weights.a2 * s * s / denom
            self._key = key
        return self._c1, self._c2


@dataclass
class SDWorkspace:
    """Denominator guard for the exact line search, fixed per design."""

    guard: float

    @classmethod
    def from_design(cls, design: DesignMatrix) -> "SDWorkspace":
        a2 = 1.0 / design.n
        fro2 = float(np.sum(design.X * design.X))
        return cls(guard=1e-12 * (1.0 + a2 * fro2))


def _mm_step(beta, scores, ws: MMWorkspace, design, constraint, weights) -> np.ndarray:
    y = design.y
    z = np.where(y * scores >= 1.0, scores, y)
    svd = ws.svd
    if weights.b2 == 0.0:
        # unpenalized system: minimum-norm least-squares solution
        return svd.V @ ((svd.U.T @ z) / svd.s)
    pm = project(beta, constraint)
    c1, c2 = ws.coefficients(weights)
    if ws.per_value_loop:
        out = pm.copy()
        for j in range(svd.r):
            uz_j = svd.U[:, j] @ z
            vp_j = svd.V[:, j] @ pm
            out += (c1[j] * uz_j - c2[j] * vp_j) * svd.V[:, j]
        return out
    return pm + svd.V @ (c1 * (svd.U.T @ z) - c2 * (svd.V.T @ pm))


def mm_update(beta, ws: MMWorkspace, design: DesignMatrix,
              constraint: SparsityConstraint, weights: PenaltyWeights) -> np.ndarray:
    """Exact minimizer of the anchored majorizer via the cached factorization."""
    beta = np.asarray(beta, dtype=float)
    return _mm_step(beta, design.X @ beta, ws, design, constraint, weights)


def step_size(grad, design: DesignMatrix, weights: PenaltyWeights, guard: float) -> float:
    """Exact minimizer of the majorizer along -grad, guarded against 0/0."""
    grad = np.asarray(grad, dtype=float)
    gsq = float(grad @ grad)
    Xg = design.X @ grad
    return gsq / (weights.a2 * float(Xg @ Xg) + weights.b2 * gsq + guard)


def _sd_step(beta, grad, ws: SDWorkspace, design, weights) -> np.ndarray:
    return beta - step_size(grad, design, weights, ws.guard) * grad


def sd_update(beta, ws: SDWorkspace, design: DesignMatrix,
              constraint: SparsityConstraint, weights: PenaltyWeights) -> np.ndarray:
    """One steepest-descent step with the exact surrogate line search."""
    beta = np.asarray(beta, dtype=float)
    grad = _gradient_from_scores(beta, design.X @ beta, design, constraint, weights)
    return _sd_step(beta, grad, ws, design, weights)


def nesterov_step(beta_new, beta_old, j: int, policy: AccelPolicy,
                  ascended: bool = False):
    """Extrapolate past the fresh iterate; an ascent discards it and resets j.

    Returns the candidate iterate and the updated counter.
    """
    beta_new = np.asarray(beta_new, dtype=float)
    if ascended and policy.restart_on_ascent:
        return beta_new.copy(), 1
    w = policy.weight(j)
    if w == 0.0:
        return beta_new.copy(), j + 1
    return beta_new + w * (beta_new - np.asarray(beta_old, dtype=float)), j + 1


def _solve_subproblem(beta0, design, constraint, weights, cfg: SolverConfig,
                      step, history=None):
    """Iterate ``step`` until the squared gradient norm drops below
    ``cfg.grad_tol`` or ``cfg.max_inner`` updates have been taken.

    Convergence is always checked at the un-extrapolated iterate; acceleration
    only changes the point the next update expands around.
    """
    X = design.X
    beta = np.asarray(beta0, dtype=float).copy()
    scores = X @ beta
    grad = _gradient_from_scores(beta, scores, design, constraint, weights)
    grad_sq = float(grad @ grad)
    accel = cfg.accel
    j = 1
    iters = 0
    while grad_sq >= cfg.grad_tol and iters < cfg.max_inner:
        beta_new = step(beta, scores, grad)
        scores_new = X @ beta_new
        grad_new = _gradient_from_scores(beta_new, scores_new, design, constraint, weights)
        grad_sq_new = float(grad_new @ grad_new)
        iters += 1
        if history is not None:
            history.append(_objective_from_scores(beta_new, scores_new, design, constraint, weights))
        if grad_sq_new < cfg.grad_tol or iters >= cfg.max_inner:
            beta, scores, grad, grad_sq = beta_new, scores_new, grad_new, grad_sq_new
            break
        if accel is not None and iters > accel.warmup:
            w = accel.weight(j)
            if w > 0.0:
                cand = beta_new + w * (beta_new - beta)
                scores_cand = X @ cand
                f_new = _objective_from_scores(beta_new, scores_new, design, constraint, weights)
                f_cand = _objective_from_scores(cand, scores_cand, design, constraint, weights)
                if f_cand > f_new and accel.restart_on_ascent:
                    j = 1
                else:
                    j += 1
                    beta_new, scores_new = cand, scores_cand
                    grad_new = _gradient_from_scores(cand, scores_cand, design, constraint, weights)
                    grad_sq_new = float(grad_new @ grad_new)
            else:
                j += 1
        beta, scores, grad, grad_sq = beta_new, scores_new, grad_new, grad_sq_new
    objective = _objective_from_scores(beta, scores, design, constraint, weights)
    return beta, iters, grad_sq, objective, scores


def _report(beta, iters, grad_sq, objective, scores, design, constraint, cfg, t0) -> FitReport:
    norm = constraint.p - constraint.k + 1
    return FitReport(
        outer_iters=0,
        total_inner_iters=iters,
        objective=objective,
        grad_sq=grad_sq,
        distance=sq_distance(beta, constraint) / norm,
        sv_count=int(np.count_nonzero(design.y * scores <= 1.0)),
        converged=bool(grad_sq < cfg.grad_tol),
        wall_time=time.perf_counter() - t0,
    )


def mm_solve(beta0, ws: MMWorkspace, design: DesignMatrix, constraint: SparsityConstraint,
             weights: PenaltyWeights, cfg: SolverConfig | None = None, history=None):
    """Run the factorization update to stationarity at fixed weights."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()

    def step(beta, scores, grad):
        return _mm_step(beta, scores, ws, design, constraint, weights)

    beta, iters, grad_sq, objective, scores = _solve_subproblem(
        beta0, design, constraint, weights, cfg, step, history)
    return beta, _report(beta, iters, grad_sq, objective, scores, design, constraint, cfg, t0)


def sd_solve(beta0, ws: SDWorkspace, design: DesignMatrix, constraint: SparsityConstraint,
             weights: PenaltyWeights, cfg: SolverConfig | None = None, history=None):
    """Run guarded steepest descent to stationarity at fixed weights."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()

    def step(beta, scores, grad):
        return _sd_step(beta, grad, ws, design, weights)

    beta, iters, grad_sq, objective, scores = _solve_subproblem(
        beta0, design, constraint, weights, cfg, step, history)
    return beta, _report(beta, iters, grad_sq, objective, scores, design, constraint, cfg, t0)

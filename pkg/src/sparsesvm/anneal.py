"""Annealed fitting: solve a ladder of distance-penalized subproblems with a
geometrically growing penalty, stop on the normalized squared distance, then
hard-project the result onto the sparsity set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import AnnealSchedule, FitReport, SolverConfig
from .data import DesignMatrix
from .objective import PenaltyWeights
from .solvers import MMWorkspace, SDWorkspace, _mm_step, _sd_step, _solve_subproblem
from .sparsity import SparsityConstraint, project, sq_distance

__all__ = ["FitError", "OuterRecord", "SOLVERS", "sv_count", "make_workspace", "prox_dist_fit"]

SOLVERS = ("mm", "sd")


class FitError(RuntimeError):
    """A fit diverged or could not be carried out."""


@dataclass
class OuterRecord:
    """State after one penalty level: handed to trace hooks."""

    outer: int
    rho: float
    inner_iters: int
    objective: float
    grad_sq: float
    distance: float
    beta: np.ndarray


def sv_count(beta, design: DesignMatrix) -> int:
    """Number of samples on or inside the margin: y_i x_i' beta <= 1."""
    margins = design.y * (design.X @ beta)
    return int(np.count_nonzero(margins <= 1.0))


def make_workspace(design: DesignMatrix, solver: str, cfg: SolverConfig):
    solver = solver.lower()
    if solver == "mm":
        return MMWorkspace.from_design(design, cfg.svd_rank_tol, cfg.mm_per_value_loop)
    if solver == "sd":
        return SDWorkspace.from_design(design)
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def prox_dist_fit(design: DesignMatrix, constraint: SparsityConstraint, beta0,
                  solver: str = "mm", sched: AnnealSchedule | None = None,
                  cfg: SolverConfig | None = None, workspace=None,
                  trace_hook=None, history=None):
    """Fit one binary classifier at sparsity level ``constraint``.

    Each penalty level is solved to inner stationarity, the penalty then grows
    by ``sched.multiplier``. The loop halts when the normalized squared
    distance to the sparsity set falls below ``sched.dist_tol``, stalls, or
    the outer budget runs out; the returned coefficients are the projection of
    the last iterate, so they are always feasible. ``converged`` is set only
    when the final distance actually met the tolerance.
    """
    sched = sched or AnnealSchedule()
    cfg = cfg or SolverConfig()
    solver = solver.lower()
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    ws = workspace if workspace is not None else make_workspace(design, solver, cfg)

    t0 = time.perf_counter()
    beta = np.asarray(beta0, dtype=float).copy()
    if beta.shape != (design.X.shape[1],):
        raise ValueError(f"beta0 has shape {beta.shape}, expected ({design.X.shape[1]},)")
    norm = constraint.p - constraint.k + 1
    # the stall test needs two post-solve distances, so it first arms at outer 2
    d_prev = None
    d_cur = sq_distance(beta, constraint) / norm
    rho = sched.rho0
    total_inner = 0
    outer = 0
    objective = float("nan")
    grad_sq = float("nan")
    for outer in range(1, sched.max_outer + 1):
        weights = PenaltyWeights.for_problem(design.n, constraint, rho)
        if solver == "mm":
            def step(b, s, g, _w=weights):
                return _mm_step(b, s, ws, design, constraint, _w)
        else:
            def step(b, s, g, _w=weights):
                return _sd_step(b, g, ws, design, _w)
        beta, iters, grad_sq, objective, _ = _solve_subproblem(
            beta, design, constraint, weights, cfg, step, history)
        total_inner += iters
        if not np.isfinite(objective):
            raise FitError(
                f"objective became non-finite at outer iteration {outer} (rho={rho:g})")
        d_cur = sq_distance(beta, constraint) / norm
        if trace_hook is not None:
            trace_hook(OuterRecord(outer, rho, iters, objective, grad_sq, d_cur, beta.copy()))
        if d_cur <= sched.dist_tol:
            break
        if d_prev is not None and abs(d_cur - d_prev) < sched.dist_tol * (1.0 + d_prev):
            break
        d_prev = d_cur
        rho *= sched.multiplier

    beta_final = project(beta, constraint)
    report = FitReport(
        outer_iters=outer,
        total_inner_iters=total_inner,
        objective=objective,
        grad_sq=grad_sq,
        distance=d_cur,
        sv_count=sv_count(beta_final, design),
        converged=bool(d_cur <= sched.dist_tol),
        wall_time=time.perf_counter() - t0,
    )
    return beta_final, report

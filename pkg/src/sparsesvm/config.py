"""Configuration dataclasses shared by the solvers, plus the per-fit report."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

__all__ = ["AccelPolicy", "AnnealSchedule", "SolverConfig", "FitReport"]


@dataclass(frozen=True)
class AccelPolicy:
    """Extrapolation schedule for the inner loop.

    Weight (j - 1) / (j + shift - 1) on the momentum term, engaged only after
    ``warmup`` inner iterations of a subproblem. When an extrapolated point
    raises the objective it is discarded and the counter j resets to 1.
    """

    shift: int = 3
    warmup: int = 10
    restart_on_ascent: bool = True

    def __post_init__(self):
        if self.shift < 3:
            raise ValueError(f"shift must be >= 3, got {self.shift}")
        if self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")

    def weight(self, j: int) -> float:
        return (j - 1) / (j + self.shift - 1)


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric penalty ladder with a normalized-distance stopping rule."""

    rho0: float = 1.0
    multiplier: float = 1.2
    max_outer: int = 100
    dist_tol: float = 1e-6

    def __post_init__(self):
        if self.rho0 <= 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.multiplier <= 1.0:
            raise ValueError(f"multiplier must exceed 1, got {self.multiplier}")
        if self.max_outer < 1:
            raise ValueError(f"max_outer must be >= 1, got {self.max_outer}")
        if self.dist_tol <= 0:
            raise ValueError(f"dist_tol must be positive, got {self.dist_tol}")


@dataclass(frozen=True)
class SolverConfig:
    """Inner-solver tolerances and switches.

    ``grad_tol`` bounds the squared gradient norm; ``accel=None`` turns
    extrapolation off; ``mm_per_value_loop`` selects the column-at-a-time
    accumulation of the factorization update instead of the matrix form.
    """

    grad_tol: float = 1e-6
    max_inner: int = 10_000
    accel: AccelPolicy | None = field(default_factory=AccelPolicy)
    svd_rank_tol: float = 1e-12
    mm_per_value_loop: bool = False

    def __post_init__(self):
        if self.grad_tol <= 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_inner < 1:
            raise ValueError(f"max_inner must be >= 1, got {self.max_inner}")
        if self.svd_rank_tol < 0:
            raise ValueError("svd_rank_tol must be nonnegative")


@dataclass
class FitReport:
    """Diagnostics of one fit: iteration counts, final objective pieces, timing."""

    outer_iters: int = 0
    total_inner_iters: int = 0
    objective: float = float("nan")
    grad_sq: float = float("nan")
    distance: float = float("nan")
    sv_count: int = 0
    converged: bool = False
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["converged"] = bool(d["converged"])
        return d

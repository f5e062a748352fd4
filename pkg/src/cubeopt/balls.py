"""Intersections of geodesic balls B(a, r) = {x : d(a, x) <= r}.

Feasibility is decided by minimising the penalty sum_a max(d_a - r_a, 0):
its minimum is zero exactly when the balls have a common point.  The
distance from a point b to the intersection is then found by bisection on
the radius of one more ball centred at b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import CubicalComplex
from .decomposition import SolveReport, minimize
from .geodesics import geodesic, point_along
from .objectives import Objective

FEAS_TOL = 1e-7


def ball_project(complex: CubicalComplex, x, a, rho: float) -> np.ndarray:
    """Nearest point to x in the ball of radius rho about a."""
    if rho <= 0:
        raise ValueError("radius must be positive")
    path = geodesic(complex, a, x)
    if path.length <= rho:
        return path.target.copy()
    return point_along(path, rho)


@dataclass
class FeasibilityResult:
    status: str  # "feasible" or "infeasible"
    witness: np.ndarray
    penalty_value: float
    report: SolveReport | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness.tolist(), "penalty_value": self.penalty_value}


def solve_feasibility(
    complex: CubicalComplex,
    anchors,
    radii,
    x0=None,
    tol_feas: float = FEAS_TOL,
    **solve_kw,
) -> FeasibilityResult:
    obj = Objective.balls(anchors, radii)
    report = minimize(complex, obj, x0, **solve_kw)
    status = "feasible" if report.value <= tol_feas else "infeasible"
    return FeasibilityResult(status, report.minimizer, report.value, report)


@dataclass
class BisectionResult:
    status: str  # "ok", "infeasible" or "max_steps"
    lo: float
    hi: float
    witness: np.ndarray | None
    residual: float
    steps: int

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "interval": [self.lo, self.hi],
            "witness": None if self.witness is None else self.witness.tolist(),
            "residual": self.residual,
            "steps": self.steps,
        }


def distance_to_intersection(
    complex: CubicalComplex,
    b,
    anchors,
    radii,
    tol_bisect: float = 1e-3,
    tol_feas: float = FEAS_TOL,
    x0=None,
    max_steps: int = 60,
    **solve_kw,
) -> BisectionResult:
    """Bracket the distance from b to the intersection of the balls.

    Returns [lo, hi] with hi - lo <= tol_bisect.  ``hi`` is always the
    radius of a ball about b found to meet the intersection; ``witness`` is
    the point certifying it and ``residual`` its penalty, so the true
    distance is at least ``lo`` minus what that residual allows.
    """
    if tol_bisect <= 0:
        raise ValueError("tol_bisect must be positive")
    b = complex.check_point(b)
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    radii = np.asarray(radii, dtype=float)
    first = solve_feasibility(complex, anchors, radii, b if x0 is None else x0, tol_feas, **solve_kw)
    if not first.feasible:
        return BisectionResult("infeasible", math.nan, math.nan, first.witness, first.penalty_value, 0)
    witness, residual = first.witness, first.penalty_value
    lo, hi = 0.0, geodesic(complex, b, witness).length
    steps = 0
    all_anchors = np.vstack([anchors, b])
    while hi - lo > tol_bisect:
        if steps >= max_steps:
            return BisectionResult("max_steps", lo, hi, witness, residual, steps)
        steps += 1
        mid = 0.5 * (lo + hi)
        res = solve_feasibility(complex, all_anchors, np.append(radii, mid), witness, tol_feas, **solve_kw)
        if res.feasible:
            hi, witness, residual = mid, res.witness, res.penalty_value
        else:
            lo = mid
    return BisectionResult("ok", lo, hi, witness, residual, steps)

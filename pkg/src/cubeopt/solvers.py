"""Minimisation over one cube behind a separation/subgradient oracle.

The cube is identified with [0, 1]^n through its chart.  An oracle maps a
query u in R^n to either a ``Separation`` (u outside the box) or a ``Cut``
(value and subgradient at u).  Solvers only see the oracle, so they also
work on plain test functions.

Also here: the cyclic proximal point method on the whole complex, used as
the slow baseline in convergence comparisons.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .complex import Chart, Cube, CubicalComplex, chart_of
from .geodesics import geodesic, point_along
from .objectives import Objective, cell_value_subgradient, evaluate


@dataclass(frozen=True)
class Separation:
    normal: np.ndarray
    offset: float  # the box satisfies normal @ u <= offset; the query does not


@dataclass(frozen=True)
class Cut:
    value: float
    subgradient: np.ndarray


OracleResponse = Union[Separation, Cut]


@dataclass
class CellSolveResult:
    """Outcome of one subproblem.

    ``minimizer`` is in the coordinates the oracle speaks (chart coordinates
    for the generic solvers; :func:`solve_cell` converts to ambient ones).
    ``trace`` holds (geodesics used, best value) at every improvement and
    ``history`` the best value after each iteration.
    """

    minimizer: np.ndarray
    value: float
    iterations: int
    geodesic_count: int
    trace: list[tuple[int, float]] = field(default_factory=list)
    history: list[float] = field(default_factory=list)
    converged: bool = True
    cube: int | None = None

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["geodesics", "best_value"])
            for g, v in self.trace:
                w.writerow([g, repr(float(v))])

    def to_json(self) -> dict:
        return {
            "minimizer": np.asarray(self.minimizer).tolist(),
            "value": self.value,
            "iterations": self.iterations,
            "geodesic_count": self.geodesic_count,
            "converged": self.converged,
            "cube": self.cube,
        }


def box_separation(u: np.ndarray) -> Separation | None:
    """Hyperplane through the most violated bound of [0, 1]^n, if any."""
    over = u - 1.0
    under = -u
    i_over = int(np.argmax(over))
    i_under = int(np.argmax(under))
    if max(over[i_over], under[i_under]) <= 0:
        return None
    normal = np.zeros_like(u)
    if over[i_over] >= under[i_under]:
        normal[i_over] = 1.0
        return Separation(normal, 1.0)
    normal[i_under] = -1.0
    return Separation(normal, 0.0)


class CellOracle:
    """Separation/subgradient oracle for an objective restricted to a cube."""

    def __init__(self, complex: CubicalComplex, obj: Objective, cube: Cube | int):
        self.complex = complex
        self.obj = obj
        if isinstance(cube, (int, np.integer)):
            self.index = int(cube)
            cube = complex.cubes[self.index]
        else:
            self.index = complex.cube_index(cube)
        self.cube = cube
        self.chart: Chart = chart_of(cube)
        self.geodesic_count = 0

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __call__(self, u) -> OracleResponse:
        u = np.asarray(u, dtype=float).reshape(-1)
        sep = box_separation(u)
        if sep is not None:
            return sep
        x = self.chart.embed(u)
        value, g = cell_value_subgradient(self.complex, self.obj, self.cube, x)
        self.geodesic_count += len(self.obj)
        return Cut(value, self.chart.restrict(g))

    def value(self, u) -> float:
        """Objective at chart point u (counts its geodesics)."""
        self.geodesic_count += len(self.obj)
        return evaluate(self.complex, self.obj, self.chart.embed(u))


def oracle(complex: CubicalComplex, obj: Objective, P: Cube, query) -> OracleResponse:
    return CellOracle(complex, obj, P)(query)


def _geodesics(oracle_fn, calls: int) -> int:
    return int(getattr(oracle_fn, "geodesic_count", calls))


def default_max_iter(n: int) -> int:
    return int(math.ceil(50 * n * n * math.log(max(n, 2) * 1e6)))


def ellipsoid_minimize(
    oracle_fn: Callable[[np.ndarray], OracleResponse],
    n: int,
    tol: float = 1e-9,
    max_iter: int | None = None,
    f_max: float | None = None,
    deep_cuts: bool = False,
) -> CellSolveResult:
    """Ellipsoid method on [0, 1]^n, central cuts unless ``deep_cuts``.

    Starts from the ball of radius sqrt(n)/2 about the centre of the box.
    Stops when the a posteriori gap certificate
    ``best - max_t (f(c_t) - sqrt(g_t' E_t g_t))`` drops below ``tol``, when
    a zero subgradient is found, or, if ``f_max`` (an upper bound for f on
    the box) is given, when ``2 sqrt(n) f_max exp(-t / 2n^2) <= tol``.
    In one dimension the ellipsoid is an interval and the update is
    bisection.  Deep cuts move each cut to the best value found so far (or
    to the violated bound) and never remove a point better than the
    incumbent.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if max_iter is None:
        max_iter = default_max_iter(n)
    c = np.full(n, 0.5)
    E = np.eye(n) * (n / 4.0)
    best_x, best_f = None, math.inf
    lower = -math.inf
    trace, history = [], []
    calls = 0
    converged = False
    for t in range(1, max_iter + 1):
        resp = oracle_fn(c.copy())
        calls += 1
        if isinstance(resp, Separation):
            g = resp.normal
        else:
            g = np.asarray(resp.subgradient, dtype=float)
            if resp.value < best_f:
                best_f, best_x = float(resp.value), c.copy()
                trace.append((_geodesics(oracle_fn, calls), best_f))
            if not np.any(g):
                lower = max(lower, float(resp.value))
                history.append(best_f)
                converged = True
                break
        Eg = E @ g
        gEg = float(g @ Eg)
        if gEg <= 0:
            history.append(best_f)
            converged = best_x is not None
            break
        root = math.sqrt(gEg)
        if isinstance(resp, Cut):
            lower = max(lower, float(resp.value) - root)
            depth = float(resp.value) - best_f
        else:
            depth = float(g @ c) - resp.offset
        history.append(best_f)
        if best_f - lower <= tol:
            converged = True
            break
        if f_max is not None and 2 * math.sqrt(n) * f_max * math.exp(-t / (2 * n * n)) <= tol:
            converged = True
            break
        # deep cut: every point of the ellipsoid with f <= best satisfies
        # g @ (u - c) <= -depth
        alpha = min(max(depth / root, 0.0), 0.999) if deep_cuts else 0.0
        b = Eg / root
        if n == 1:
            edge = c[0] - alpha * b[0]
            lo, hi = (c[0] - b[0], edge) if b[0] > 0 else (edge, c[0] - b[0])
            c = np.array([(lo + hi) / 2])
            E = np.array([[((hi - lo) / 2) ** 2]])
        else:
            c = c - (1 + n * alpha) / (n + 1) * b
            E = (n * n * (1 - alpha * alpha) / (n * n - 1.0)) * (
                E - (2 * (1 + n * alpha) / ((n + 1) * (1 + alpha))) * np.outer(b, b)
            )
            E = 0.5 * (E + E.T)
            w = np.linalg.eigvalsh(E)
            if w[0] <= 0 or w[-1] / w[0] > 1e14:
                E = np.eye(n) * w[-1]
    if best_x is None:
        raise RuntimeError("ellipsoid method never queried a feasible point")
    return CellSolveResult(best_x, best_f, calls, _geodesics(oracle_fn, calls), trace, history, converged)


def subgradient_minimize(
    oracle_fn: Callable[[np.ndarray], OracleResponse],
    n: int,
    step: float | None = None,
    max_iter: int = 10000,
    tol: float = 0.0,
    f_target: float | None = None,
    normalize: bool = False,
) -> CellSolveResult:
    """Projected subgradient method on [0, 1]^n: u <- clip(u - t_k g), t_k = step/sqrt(k).

    ``step`` defaults to sqrt(n), the diameter of the box.  With
    ``normalize`` the step is taken along g/|g| instead, so t_k is a step
    length.  Stops early on a zero subgradient, when the projected step
    leaves the iterate unchanged, or once
    ``best <= f_target + tol`` when a target value is supplied.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    c = math.sqrt(n) if step is None else step
    x = np.full(n, 0.5)
    best_x, best_f = None, math.inf
    trace, history = [], []
    calls = 0
    for k in range(1, max_iter + 1):
        resp = oracle_fn(x.copy())
        calls += 1
        if isinstance(resp, Separation):  # not reached: iterates stay in the box
            x = np.clip(x, 0.0, 1.0)
            continue
        if resp.value < best_f:
            best_f, best_x = float(resp.value), x.copy()
            trace.append((_geodesics(oracle_fn, calls), best_f))
        history.append(best_f)
        g = np.asarray(resp.subgradient, dtype=float)
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        if f_target is not None and best_f <= f_target + tol:
            break
        direction = g / gn if normalize else g
        nxt = np.clip(x - (c / math.sqrt(k)) * direction, 0.0, 1.0)
        if np.array_equal(nxt, x):  # projected step is stationary: x is optimal
            break
        x = nxt
    return CellSolveResult(best_x, best_f, calls, _geodesics(oracle_fn, calls), trace, history)


def cyclic_proximal_point(
    complex: CubicalComplex,
    obj: Objective,
    x0,
    step: float = 1.0,
    max_iter: int = 1000,
    f_target: float | None = None,
    tol: float = 0.0,
) -> CellSolveResult:
    """Cyclic proximal point method for the mean (q=2) or median (q=1).

    Cycle k uses the step mu_k = step / k and applies the proximal map of
    each weighted distance term in anchor order; each proximal step is a
    move along one geodesic.  ``max_iter`` counts proximal steps, i.e.
    geodesics.  Objective values for the trace are monitoring only and are
    not counted as geodesics.
    """
    if obj.kind != "power_mean" or obj.q not in (1.0, 2.0):
        raise ValueError("cyclic proximal point supports power_mean with q in {1, 2}")
    x = complex.check_point(x0).copy()
    best_x, best_f = x.copy(), evaluate(complex, obj, x)
    trace, history = [(0, best_f)], []
    count = 0
    cycle = 0
    while count < max_iter:
        cycle += 1
        mu = step / cycle
        for a, lam in zip(obj.anchors, obj.weights):
            if count >= max_iter:
                break
            path = geodesic(complex, x, a)
            count += 1
            d = path.length
            if obj.q == 2:
                t = 2 * mu * lam / (1 + 2 * mu * lam) * d
            else:
                t = min(mu * lam, d)
            x = point_along(path, t)
            f = evaluate(complex, obj, x)
            if f < best_f:
                best_f, best_x = f, x.copy()
                trace.append((count, best_f))
            history.append(best_f)
        if f_target is not None and best_f <= f_target + tol:
            break
    return CellSolveResult(best_x, best_f, count, count, trace, history)


SOLVERS = ("ellipsoid", "subgrad")


def solve_cell(
    complex: CubicalComplex,
    obj: Objective,
    index: int,
    method: str = "ellipsoid",
    tol: float = 1e-12,
    max_iter: int | None = None,
    snap: float = 1e-5,
) -> CellSolveResult:
    """Minimise ``obj`` over maximal cube ``index``; result in ambient coordinates.

    Chart coordinates within ``snap`` of 0 or 1 are moved onto the boundary
    when that does not raise the value by more than ``tol``, so minimisers on
    lower-dimensional faces are reported exactly on them.
    """
    orc = CellOracle(complex, obj, index)
    n = orc.dim
    if n == 0:
        x = orc.chart.embed(np.zeros(0))
        v = orc.value(np.zeros(0))
        return CellSolveResult(x, v, 1, orc.geodesic_count, [(orc.geodesic_count, v)], [v], True, index)
    if method == "ellipsoid":
        res = ellipsoid_minimize(orc, n, tol=tol, max_iter=max_iter)
    elif method == "subgrad":
        res = subgradient_minimize(orc, n, max_iter=max_iter or 10000)
    else:
        raise ValueError(f"unknown cell solver {method!r}")
    u = res.minimizer
    snapped = np.where(u < snap, 0.0, np.where(u > 1 - snap, 1.0, u))
    if np.any(snapped != u):
        v = orc.value(snapped)
        if v <= res.value + tol:
            u = snapped
            if v < res.value:
                res.trace.append((orc.geodesic_count, v))
            res.value = min(v, res.value) if v < res.value else v
    res.minimizer = orc.chart.embed(u)
    res.geodesic_count = orc.geodesic_count
    res.cube = index
    return res

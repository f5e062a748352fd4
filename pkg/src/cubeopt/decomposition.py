"""Outer loop over cells: minimise a convex objective on the whole complex.

Repeatedly solve the objective over a maximal cube containing the current
point that has not been optimised yet.  A cube counts as optimised once any
maximal cube containing it has been solved, so the loop stops as soon as
every cube through the incumbent is covered; for a convex objective on a
CAT(0) complex the incumbent is then a global minimiser.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complex import CubicalComplex, cells_containing, check_link_condition
from .objectives import Objective, evaluate
from .solvers import CellSolveResult, solve_cell


@dataclass
class SolveReport:
    minimizer: np.ndarray
    value: float
    visited_cells: list[int]
    subproblem_results: list[CellSolveResult]
    total_geodesics: int
    certified: bool
    trace: list[tuple[int, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "minimizer": self.minimizer.tolist(),
            "value": self.value,
            "visited_cells": list(self.visited_cells),
            "subproblem_results": [r.to_json() for r in self.subproblem_results],
            "total_geodesics": self.total_geodesics,
            "certified": self.certified,
        }

    def write_trace(self, path) -> None:
        CellSolveResult(self.minimizer, self.value, 0, self.total_geodesics, self.trace).write_trace(path)


def minimize(
    complex: CubicalComplex,
    obj: Objective,
    x0=None,
    cell_solver: str = "ellipsoid",
    tol: float = 1e-9,
    cell_tol: float = 1e-12,
    max_iter: int | None = None,
    cell_order: Sequence[int] | None = None,
    exhaustive: bool = False,
    check: bool = True,
) -> SolveReport:
    """Minimise ``obj`` over ``complex`` starting from ``x0``.

    ``tol`` is the strict-improvement threshold for replacing the incumbent;
    ``cell_tol`` is passed to the per-cell solver.  ``cell_order`` is a
    priority order used instead of plain index order when choosing the next
    cube.  With ``exhaustive`` every maximal cube is solved and the best
    result kept.
    """
    obj.check(complex)
    if check:
        report = check_link_condition(complex)
        if not report.ok:
            warnings.warn(f"link condition fails at vertex {report.vertex}; result may not be a global minimiser")
    if x0 is None:
        x0 = obj.anchors[0]
    x = complex.check_point(x0).copy()
    rank = {i: k for k, i in enumerate(cell_order)} if cell_order is not None else {}
    key = lambda i: (rank.get(i, len(rank) + i), i)

    best_f = evaluate(complex, obj, x)
    total = len(obj)
    trace = [(total, best_f)]
    solved: list[int] = []
    results: list[CellSolveResult] = []

    def record(res: CellSolveResult):
        nonlocal total
        for g, v in res.trace:
            if v < trace[-1][1]:
                trace.append((total + g, v))
        total += res.geodesic_count
        results.append(res)

    if exhaustive:
        for i in sorted(range(len(complex.cubes)), key=key):
            res = solve_cell(complex, obj, i, cell_solver, cell_tol, max_iter)
            solved.append(i)
            record(res)
            if res.value < best_f - tol:
                x, best_f = res.minimizer.copy(), res.value
        return SolveReport(x, best_f, solved, results, total, all(r.converged for r in results), trace)

    certified = True
    while True:
        # faces of solved cubes are optimised too, but every face through x
        # also lies in some maximal cube through x, so tracking those suffices
        pending = [i for i in cells_containing(complex, x) if i not in solved]
        if not pending:
            break
        i = min(pending, key=key)
        res = solve_cell(complex, obj, i, cell_solver, cell_tol, max_iter)
        solved.append(i)
        record(res)
        if not res.converged:
            certified = False
        if res.value < best_f - tol:
            x, best_f = res.minimizer.copy(), res.value
    return SolveReport(x, best_f, solved, results, total, certified, trace)


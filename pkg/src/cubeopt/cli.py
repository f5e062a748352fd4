"""Command-line front end.

Every subcommand prints one JSON document (to stdout or ``--output``).
Exit status: 0 success, 1 infeasible / uncertified / invalid complex,
2 bad input.  Arguments that take JSON accept either a file path or the
JSON text itself.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .balls import distance_to_intersection, solve_feasibility
from .complex import (
    ComplexError,
    Cube,
    MembershipError,
    check_link_condition,
    check_simply_connected,
    complex_from_dict,
)
from .corebook import find_core
from .decomposition import minimize
from .geodesics import GeodesicError, geodesic
from .objectives import Objective
from .solvers import CellOracle, cyclic_proximal_point, ellipsoid_minimize, subgradient_minimize
from .subgradient import distance_subgradient
from .trees import load_tree, mean_value, tree_mean


class InputError(Exception):
    pass


def _json_arg(text: str):
    if text is None:
        return None
    if os.path.exists(text):
        text = Path(text).read_text(encoding="utf-8")
    elif text.endswith(".json"):
        raise InputError(f"no such file: {text}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from exc


def _point(text: str, name: str) -> np.ndarray:
    data = _json_arg(text)
    try:
        return np.asarray(data, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} must be a JSON array of numbers") from exc


def _complex(args):
    if not args.complex:
        raise InputError("--complex is required")
    return complex_from_dict(_json_arg(args.complex))


def _objective(args) -> Objective:
    if not args.objective:
        raise InputError("--objective is required")
    named = {"mean": 2.0, "median": 1.0}
    if args.objective in named or args.objective == "circumcenter":
        if not args.anchors:
            raise InputError(f"--objective {args.objective} needs --anchors")
        anchors = _json_arg(args.anchors)
        if args.objective == "circumcenter":
            return Objective.circumcenter(anchors)
        return Objective("power_mean", anchors, named[args.objective])
    data = _json_arg(args.objective)
    if not isinstance(data, dict):
        raise InputError("objective JSON must be an object")
    if args.anchors:
        data = {**data, "anchors": _json_arg(args.anchors)}
    try:
        return Objective.from_json(data)
    except KeyError as exc:
        raise InputError(f"objective is missing {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    cx = _complex(args)
    link = check_link_condition(cx)
    simply = check_simply_connected(cx)
    core = find_core(cx)
    cat0 = "yes" if link.ok and simply == "yes" else ("no" if not link.ok or simply == "no" else "unknown")
    if cat0 == "unknown":
        print("warning: simple connectivity undecided; solver guarantees assume CAT(0)", file=sys.stderr)
    out = {
        "maximal_cubes": len(cx.cubes),
        "dimension": cx.dim,
        "euler_characteristic": cx.euler_characteristic(),
        "link_condition": link.to_json(),
        "simply_connected": simply,
        "core": None if core is None else core.to_json(),
        "cat0": cat0,
    }
    if not link.ok:
        print(f"link condition fails at vertex {list(link.vertex)}", file=sys.stderr)
    return out, 1 if cat0 == "no" else 0


def cmd_dist(args):
    cx = _complex(args)
    path = geodesic(cx, _point(args.x, "x"), _point(args.y, "y"))
    return {"length": path.length}, 0


def cmd_geodesic(args):
    cx = _complex(args)
    return geodesic(cx, _point(args.x, "x"), _point(args.y, "y")).to_json(), 0


def cmd_subgrad(args):
    cx = _complex(args)
    cell = _json_arg(args.cell)
    if isinstance(cell, int):
        P = cx.cubes[cell]
    else:
        P = Cube(tuple(cell["base"]), tuple(cell["axes"]))
        if not cx.has_cell(P):
            raise InputError(f"{P} is not a cell of the complex")
    sg = distance_subgradient(cx, P, _point(args.x, "x"), _point(args.a, "a"))
    return {"vector": sg.vector.tolist(), "distance": sg.distance}, 0


def cmd_solve(args):
    cx = _complex(args)
    obj = _objective(args).check(cx)
    x0 = _point(args.x0, "x0") if args.x0 else None
    if args.solver == "cpp":
        res = cyclic_proximal_point(cx, obj, obj.anchors[0] if x0 is None else x0, max_iter=args.max_iter or 1000)
        if args.trace:
            res.write_trace(args.trace)
        out = {"minimizer": res.minimizer.tolist(), "value": res.value, "total_geodesics": res.geodesic_count,
               "certified": False}
        return out, 1
    report = minimize(
        cx, obj, x0, cell_solver=args.solver, cell_tol=args.tol, max_iter=args.max_iter,
        exhaustive=args.exhaustive,
    )
    if args.trace:
        report.write_trace(args.trace)
    return report.to_json(), 0 if report.certified else 1


def cmd_tree_mean(args):
    if not args.tree:
        raise InputError("--tree is required")
    tree, points = load_tree(_json_arg(args.tree))
    if not points:
        raise InputError("tree file has no points")
    m = tree_mean(tree, points)
    return {"mean": m.to_json(), "value": mean_value(tree, points, m)}, 0


def _balls_objective(args) -> Objective:
    obj = _objective(args)
    if obj.kind != "balls":
        raise InputError("objective kind must be 'balls'")
    return obj


def cmd_balls(args):
    cx = _complex(args)
    obj = _balls_objective(args).check(cx)
    x0 = _point(args.x0, "x0") if args.x0 else None
    res = solve_feasibility(cx, obj.anchors, obj.radii, x0, args.tol_feas, max_iter=args.max_iter)
    return res.to_json(), 0 if res.feasible else 1


def cmd_ball_dist(args):
    cx = _complex(args)
    obj = _balls_objective(args).check(cx)
    if not args.b:
        raise InputError("--b is required")
    res = distance_to_intersection(
        cx, _point(args.b, "b"), obj.anchors, obj.radii, tol_bisect=args.tol, tol_feas=args.tol_feas,
        max_iter=args.max_iter,
    )
    return res.to_json(), 0 if res.status == "ok" else 1


def cmd_core(args):
    cx = _complex(args)
    core = find_core(cx)
    return {"core": None if core is None else core.core.to_json(), "certifies_cat0": core is not None}, 0


def cmd_compare(args):
    cx = _complex(args)
    obj = _objective(args).check(cx)
    cell = int(args.cell or 0)
    n = cx.cubes[cell].dim
    iters = args.max_iter or 1000
    runs = {
        "ellipsoid": ellipsoid_minimize(CellOracle(cx, obj, cell), n, tol=args.tol, max_iter=iters),
        "subgrad": subgradient_minimize(CellOracle(cx, obj, cell), n, max_iter=iters),
        "cpp": cyclic_proximal_point(cx, obj, CellOracle(cx, obj, cell).chart.embed(np.full(n, 0.5)), max_iter=iters),
    }
    out_dir = Path(args.trace or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name, res in runs.items():
        path = out_dir / f"{name}.csv"
        res.write_trace(path)
        summary[name] = {"best_value": res.value, "geodesics": res.geodesic_count, "trace": str(path)}
    return summary, 0


COMMANDS = {
    "validate": (cmd_validate, "check the link condition, simple connectivity and core"),
    "dist": (cmd_dist, "intrinsic distance between --x and --y"),
    "geodesic": (cmd_geodesic, "geodesic polyline from --x to --y"),
    "subgrad": (cmd_subgrad, "subgradient of d_a restricted to --cell at --x"),
    "solve": (cmd_solve, "minimise an objective over the complex"),
    "tree-mean": (cmd_tree_mean, "exact mean of points on a metric tree"),
    "balls": (cmd_balls, "decide whether the balls of a balls objective intersect"),
    "ball-dist": (cmd_ball_dist, "bracket the distance from --b to the intersection of balls"),
    "core": (cmd_core, "report the core of the complex, if any"),
    "compare": (cmd_compare, "run ellipsoid, subgrad and cpp on one cell and write trace CSVs"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubeopt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--complex", help="complex JSON (file or text)")
        p.add_argument("--output", help="write the JSON result here instead of stdout")
        p.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
        if name in ("dist", "geodesic"):
            p.add_argument("--x", required=True, help="first point")
            p.add_argument("--y", required=True, help="second point")
        if name == "subgrad":
            p.add_argument("--cell", required=True, help='cube index or {"base": ..., "axes": ...}')
            p.add_argument("--x", required=True, help="point in the cell")
            p.add_argument("--a", required=True, help="anchor point")
        if name in ("solve", "balls", "ball-dist", "compare"):
            p.add_argument("--objective", help="objective JSON, or one of mean, median, circumcenter")
            p.add_argument("--anchors", help="anchor list JSON (overrides the objective's anchors)")
            p.add_argument("--max-iter", type=int, default=None, help="per-cell iteration cap")
        if name in ("solve", "balls"):
            p.add_argument("--x0", help="starting point (default: first anchor)")
        if name in ("solve", "compare"):
            p.add_argument("--tol", type=float, default=1e-12, help="per-cell solver tolerance (default 1e-12)")
            p.add_argument("--trace", help="trace CSV path (compare: output directory)")
        if name == "solve":
            p.add_argument("--solver", choices=("ellipsoid", "subgrad", "cpp"), default="ellipsoid",
                           help="cell solver (default ellipsoid); cpp runs cyclic proximal point globally")
            p.add_argument("--exhaustive", action="store_true", help="solve every maximal cube")
        if name == "compare":
            p.add_argument("--cell", default="0", help="index of the cube to compare on (default 0)")
        if name in ("balls", "ball-dist"):
            p.add_argument("--tol-feas", type=float, default=1e-7, help="penalty feasibility tolerance (default 1e-7)")
        if name == "ball-dist":
            p.add_argument("--b", help="point whose distance is bracketed")
            p.add_argument("--tol", type=float, default=1e-3, help="bisection interval width (default 1e-3)")
        if name == "tree-mean":
            p.add_argument("--tree", help="tree JSON with points")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out, code = func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (InputError, ComplexError, MembershipError, GeodesicError, ValueError, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(out, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

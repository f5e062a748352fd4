"""Euclidean subgradients of distance functions restricted to one cube.

Given a cube P, a point x in P and an anchor a, the geodesic [x, a] leaves
x along an initial segment [x, y] lying in some cube Q.  Let z be the
nearest point to y in the common face F = P ∩ Q.  Then

    g = cos(angle y x z) / |x - z| * (x - z)

is a subgradient of d_a restricted to P at x (g = 0 when a = x or z = x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import Cube, CubicalComplex, MembershipError, cube_intersection
from .geodesics import GeodesicPath, ZERO_SEGMENT, geodesic

DEGENERATE = 1e-11


@dataclass(frozen=True)
class CellSubgradient:
    cell: Cube
    base_point: np.ndarray
    anchor: np.ndarray
    vector: np.ndarray
    distance: float


def initial_segment(path: GeodesicPath, P: Cube, complex: CubicalComplex) -> tuple[np.ndarray, Cube]:
    """First breakpoint y after the source and the cube Q holding [x, y]."""
    if path.length <= ZERO_SEGMENT:
        raise ValueError("trivial geodesic has no initial segment")
    x = path.source
    if not P.contains(x):
        raise MembershipError("geodesic does not start in P")
    y = path.breakpoints[1]
    Q = complex.cubes[path.cell_sequence[0]]
    return y, Q


def distance_subgradient(complex: CubicalComplex, P: Cube, x, a) -> CellSubgradient:
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    if not P.contains(x):
        raise MembershipError(f"{x.tolist()} is not in {P}")
    zero = np.zeros(complex.ambient_dim)
    path = geodesic(complex, x, a)
    if path.length <= ZERO_SEGMENT:
        return CellSubgradient(P, x, a, zero, path.length)
    y, Q = initial_segment(path, P, complex)
    F = cube_intersection(P, Q)
    z = F.clamp(y)
    xz = x - z
    nxz = np.linalg.norm(xz)
    if nxz <= DEGENERATE:
        return CellSubgradient(P, x, a, zero, path.length)
    yx = y - x
    cos = float(yx @ (z - x)) / (np.linalg.norm(yx) * nxz)
    g = cos / nxz * xz
    mask = np.zeros(complex.ambient_dim, dtype=bool)
    mask[list(P.axes)] = True
    g[~mask] = 0.0
    return CellSubgradient(P, x, a, g, path.length)


def _initial_direction(complex, x, p):
    path = geodesic(complex, x, p)
    u = path.breakpoints[1] - path.breakpoints[0]
    return u / np.linalg.norm(u)


def cosine_bound_check(complex: CubicalComplex, a, x, w) -> tuple[float, float]:
    """Both sides of (d(a,x) - d(a,w)) / d(x,w) <= cos(angle a x w).

    The cosine is taken between the initial directions of [x, a] and [x, w]
    in the lattice embedding.  When the two initial segments share a cube
    this is the Alexandrov angle; otherwise it can only overestimate the
    cosine, so the inequality remains a valid check.
    """
    a, x, w = (np.asarray(v, dtype=float) for v in (a, x, w))
    dax = geodesic(complex, a, x).length
    daw = geodesic(complex, a, w).length
    dxw = geodesic(complex, x, w).length
    if dax <= ZERO_SEGMENT or dxw <= ZERO_SEGMENT:
        raise ValueError("need a != x and w != x")
    lhs = (dax - daw) / dxw
    rhs = float(_initial_direction(complex, x, a) @ _initial_direction(complex, x, w))
    return lhs, rhs

"""Complexes whose maximal cubes all meet in one common face (a core).

Open books, spiders and their mixed-dimension relatives.  Such complexes
are always CAT(0), and a geodesic between points in different maximal cubes
is two straight segments meeting at an explicit point of the core.
"""

from __future__ import annotations

from dataclasses import dataclass
import itertools

import numpy as np

from .complex import Cube, CubicalComplex, cube_intersection


@dataclass(frozen=True)
class CoreInfo:
    core: Cube
    cube_indices: tuple[int, ...]

    def project(self, x) -> np.ndarray:
        """Orthogonal projection onto the core from any cube containing x.

        Every maximal cube is an axis-aligned box having the core as a face,
        so the projection is coordinate clamping.
        """
        return self.core.clamp(x)

    def to_json(self) -> dict:
        return {"core": self.core.to_json(), "cubes": list(self.cube_indices)}


def find_core(complex: CubicalComplex) -> CoreInfo | None:
    """The core of the complex, or None.  Cached on the complex."""
    return complex.core


def compute_core(complex: CubicalComplex) -> CoreInfo | None:
    cubes = complex.cubes
    idx = tuple(range(len(cubes)))
    if len(cubes) == 1:
        return CoreInfo(cubes[0], idx)
    core = None
    for a, b in itertools.combinations(cubes, 2):
        f = cube_intersection(a, b)
        if f is None:
            return None
        if core is None:
            core = f
        elif f != core:
            return None
    return CoreInfo(core, idx)


def core_certifies_cat0(complex: CubicalComplex) -> bool:
    return find_core(complex) is not None


def spine_point(x, y, x_f, y_f) -> np.ndarray:
    """Where the geodesic between x and y crosses the core."""
    rx = float(np.linalg.norm(x - x_f))
    ry = float(np.linalg.norm(y - y_f))
    if rx + ry == 0.0:
        return x_f.copy()
    return (ry * x_f + rx * y_f) / (rx + ry)


def core_geodesic(complex: CubicalComplex, info: CoreInfo | None, x, y):
    from .geodesics import GeodesicPath, _clean

    if info is None:
        raise ValueError("complex has no core")
    x = complex.check_point(x)
    y = complex.check_point(y)
    if complex.common_cube(x, y) is not None:
        return _clean(complex, np.vstack([x, y]))
    x_f = info.project(x)
    y_f = info.project(y)
    if np.linalg.norm(x - x_f) + np.linalg.norm(y - y_f) == 0.0:
        return _clean(complex, np.vstack([x, y]))
    z = spine_point(x, y, x_f, y_f)
    return _clean(complex, np.vstack([x, z, y]))

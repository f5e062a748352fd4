"""Finite cubical complexes realised as subcomplexes of the integer lattice Z^N.

A complex is stored as its list of maximal cubes.  Every cube is an
axis-aligned unit box ``{u : base_i <= u_i <= base_i + 1 (i in axes),
u_i = base_i otherwise}``, so faces, intersections and charts are exact
integer box arithmetic.
"""

from __future__ import annotations

import itertools
import json
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

MEMBERSHIP_TOL = 1e-12


class ComplexError(ValueError):
    """Malformed or invalid complex description."""


class MembershipError(ValueError):
    """A point does not lie where it is required to."""


@dataclass(frozen=True, order=True)
class Cube:
    base: tuple[int, ...]
    axes: tuple[int, ...]

    def __post_init__(self):
        base = tuple(int(b) for b in self.base)
        axes = tuple(sorted(int(a) for a in self.axes))
        if len(set(axes)) != len(axes):
            raise ComplexError(f"repeated axis in {axes}")
        if any(a < 0 or a >= len(base) for a in axes):
            raise ComplexError(f"axis out of range for base of length {len(base)}: {axes}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "axes", axes)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def ambient_dim(self) -> int:
        return len(self.base)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.base, dtype=float)

    @property
    def hi(self) -> np.ndarray:
        hi = np.array(self.base, dtype=float)
        hi[list(self.axes)] += 1.0
        return hi

    @classmethod
    def from_bounds(cls, lo: Sequence[int], hi: Sequence[int]) -> "Cube":
        axes = tuple(i for i, (l, h) in enumerate(zip(lo, hi)) if h > l)
        return cls(tuple(int(v) for v in lo), axes)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def contains_cube(self, other: "Cube") -> bool:
        return bool(np.all(other.lo >= self.lo) and np.all(other.hi <= self.hi))

    def clamp(self, x) -> np.ndarray:
        """Nearest point of the box (Euclidean projection)."""
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def vertices(self) -> Iterator[tuple[int, ...]]:
        for offs in itertools.product((0, 1), repeat=self.dim):
            v = list(self.base)
            for a, o in zip(self.axes, offs):
                v[a] += o
            yield tuple(v)

    def faces(self) -> Iterator["Cube"]:
        """All faces, including the cube itself (3**dim of them)."""
        for choice in itertools.product((None, 0, 1), repeat=self.dim):
            base = list(self.base)
            axes = []
            for a, c in zip(self.axes, choice):
                if c is None:
                    axes.append(a)
                else:
                    base[a] += c
            yield Cube(tuple(base), tuple(axes))

    def to_json(self) -> dict:
        return {"base": list(self.base), "axes": list(self.axes)}


def cube_intersection(c1: Cube, c2: Cube) -> Cube | None:
    """Intersection of two lattice cubes, or None when disjoint."""
    lo = np.maximum(c1.lo, c2.lo)
    hi = np.minimum(c1.hi, c2.hi)
    if np.any(lo > hi):
        return None
    return Cube.from_bounds(lo.astype(int), hi.astype(int))


@dataclass
class Chart:
    """Identification of a cube with [0, 1]^n on its free axes."""

    cube: Cube
    free_axes: tuple[int, ...] = field(init=False)
    fixed_values: np.ndarray = field(init=False)

    def __post_init__(self):
        self.free_axes = self.cube.axes
        self.fixed_values = self.cube.lo

    @property
    def dim(self) -> int:
        return len(self.free_axes)

    def extract(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if not self.cube.contains(p):
            raise MembershipError(f"point {p} is outside cube {self.cube}")
        idx = list(self.free_axes)
        return np.clip(p[idx] - self.fixed_values[idx], 0.0, 1.0)

    def embed(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.shape[0] != self.dim:
            raise ValueError(f"expected {self.dim} chart coordinates, got {u.shape[0]}")
        p = self.fixed_values.copy()
        p[list(self.free_axes)] += u
        return p

    def restrict(self, v) -> np.ndarray:
        """Components of an ambient vector along the free axes."""
        return np.asarray(v, dtype=float)[list(self.free_axes)]

    def lift(self, w) -> np.ndarray:
        """Ambient vector supported on the free axes."""
        v = np.zeros(self.cube.ambient_dim)
        v[list(self.free_axes)] = w
        return v


def chart_of(cube: Cube) -> Chart:
    return Chart(cube)


@dataclass(frozen=True)
class LinkReport:
    ok: bool
    vertex: tuple[int, ...] | None = None
    edges: tuple[Cube, ...] = ()

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "vertex": None if self.vertex is None else list(self.vertex),
            "edges": [e.to_json() for e in self.edges],
        }


@dataclass(frozen=True)
class CubicalComplex:
    """A finite, connected subcomplex of Z^N given by its maximal cubes.

    Immutable; derived tables (bounds, adjacency, faces) are computed lazily
    and cached on first use.
    """

    ambient_dim: int
    cubes: tuple[Cube, ...]

    @classmethod
    def from_cubes(cls, ambient_dim: int, cubes: Iterable[Cube]) -> "CubicalComplex":
        cubes = list(cubes)
        if ambient_dim < 1:
            raise ComplexError("ambient_dim must be positive")
        if not cubes:
            raise ComplexError("complex has no cubes")
        for c in cubes:
            if c.ambient_dim != ambient_dim:
                raise ComplexError(f"cube {c} does not live in Z^{ambient_dim}")
        kept = _drop_dominated(cubes)
        if len(kept) < len(cubes):
            warnings.warn(
                f"dropped {len(cubes) - len(kept)} non-maximal cube(s)", stacklevel=2
            )
        cx = cls(ambient_dim, tuple(kept))
        if not cx.is_connected():
            raise ComplexError("complex is disconnected")
        return cx

    def __len__(self) -> int:
        return len(self.cubes)

    @property
    def dim(self) -> int:
        return max(c.dim for c in self.cubes)

    @cached_property
    def _lo(self) -> np.ndarray:
        return np.array([c.lo for c in self.cubes])

    @cached_property
    def _hi(self) -> np.ndarray:
        return np.array([c.hi for c in self.cubes])

    @cached_property
    def faces_between(self) -> dict[tuple[int, int], Cube]:
        """Nonempty pairwise intersections, keyed by ordered index pairs."""
        out = {}
        for i, j in itertools.combinations(range(len(self.cubes)), 2):
            f = cube_intersection(self.cubes[i], self.cubes[j])
            if f is not None:
                out[i, j] = out[j, i] = f
        return out

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj = {i: [] for i in range(len(self.cubes))}
        for i, j in self.faces_between:
            adj[i].append(j)
        return {i: tuple(sorted(v)) for i, v in adj.items()}

    def is_connected(self) -> bool:
        seen = {0}
        todo = deque([0])
        while todo:
            i = todo.popleft()
            for j in self.adjacency[i]:
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        return len(seen) == len(self.cubes)

    def membership_mask(self, x, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,):
            raise MembershipError(f"point must have {self.ambient_dim} coordinates, got shape {x.shape}")
        return np.all((x >= self._lo - tol) & (x <= self._hi + tol), axis=1)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(self.membership_mask(x, tol).any())

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise MembershipError(f"point {x.tolist()} is not in the complex")
        return x

    def cube_index(self, cube: Cube) -> int:
        try:
            return self.cubes.index(cube)
        except ValueError:
            raise ComplexError(f"{cube} is not a maximal cube of the complex") from None

    def common_cube(self, x, y) -> int | None:
        """Smallest index of a maximal cube containing both points."""
        both = self.membership_mask(x) & self.membership_mask(y)
        hits = np.flatnonzero(both)
        return int(hits[0]) if hits.size else None

    def has_cell(self, cube: Cube) -> bool:
        """True if the lattice cube is a face of some maximal cube."""
        lo, hi = cube.lo, cube.hi
        return bool(np.any(np.all((self._lo <= lo) & (self._hi >= hi), axis=1)))

    @cached_property
    def all_cells(self) -> frozenset[Cube]:
        return frozenset(f for c in self.cubes for f in c.faces())

    @cached_property
    def core(self):
        from .corebook import compute_core

        return compute_core(self)

    def euler_characteristic(self) -> int:
        return sum((-1) ** c.dim for c in self.all_cells)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "maximal_cubes": [c.to_json() for c in self.cubes]}


def _drop_dominated(cubes: list[Cube]) -> list[Cube]:
    unique = list(dict.fromkeys(cubes))
    kept = []
    for i, c in enumerate(unique):
        if any(j != i and d.contains_cube(c) for j, d in enumerate(unique)):
            continue
        kept.append(c)
    return kept


def load_complex(text: str) -> CubicalComplex:
    """Parse the JSON complex format into a validated complex."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexError(f"complex is not valid JSON: {exc}") from exc
    return complex_from_dict(data)


def complex_from_dict(data: dict) -> CubicalComplex:
    try:
        n = int(data["ambient_dim"])
        raw = data["maximal_cubes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ComplexError(f"missing or malformed field: {exc}") from exc
    cubes = []
    for k, item in enumerate(raw):
        try:
            base, axes = item["base"], item["axes"]
        except (KeyError, TypeError) as exc:
            raise ComplexError(f"cube #{k} malformed: {item!r}") from exc
        if len(base) != n:
            raise ComplexError(f"cube #{k}: base has length {len(base)}, ambient_dim is {n}")
        if any(float(b) != int(b) for b in base):
            raise ComplexError(f"cube #{k}: base must be integral")
        if list(axes) != sorted(axes):
            raise ComplexError(f"cube #{k}: axes must be sorted ascending")
        cubes.append(Cube(tuple(int(b) for b in base), tuple(axes)))
    return CubicalComplex.from_cubes(n, cubes)


def cells_containing(complex: CubicalComplex, x) -> list[int]:
    """Indices of the maximal cubes containing x (nonempty for members)."""
    mask = complex.membership_mask(x)
    if not mask.any():
        raise MembershipError(f"point {np.asarray(x).tolist()} is not in the complex")
    return [int(i) for i in np.flatnonzero(mask)]


def _incident_edges(complex: CubicalComplex, v: tuple[int, ...]) -> list[tuple[int, int, Cube]]:
    out = []
    for axis in range(complex.ambient_dim):
        for sign in (-1, 1):
            base = list(v)
            if sign < 0:
                base[axis] -= 1
            e = Cube(tuple(base), (axis,))
            if complex.has_cell(e):
                out.append((axis, sign, e))
    return out


def _span(v: tuple[int, ...], dirs: Sequence[tuple[int, int]]) -> Cube:
    base = list(v)
    for axis, sign in dirs:
        if sign < 0:
            base[axis] -= 1
    return Cube(tuple(base), tuple(a for a, _ in dirs))


def check_link_condition(complex: CubicalComplex) -> LinkReport:
    """Gromov's link condition at every vertex.

    For each vertex, any k incident edges that pairwise span squares of the
    complex must span a k-cube of the complex.  Returns the first violation
    found (vertices in sorted order, smallest edge sets first).
    """
    vertices = sorted({v for c in complex.cubes for v in c.vertices()})
    for v in vertices:
        edges = _incident_edges(complex, v)
        m = len(edges)
        linked = np.zeros((m, m), dtype=bool)
        for i, j in itertools.combinations(range(m), 2):
            (ai, si, _), (aj, sj, _) = edges[i], edges[j]
            if ai != aj and complex.has_cell(_span(v, [(ai, si), (aj, sj)])):
                linked[i, j] = linked[j, i] = True
        # grow cliques in order of size; a clique of size 2 is a square by construction
        level = [(i, j) for i, j in itertools.combinations(range(m), 2) if linked[i, j]]
        while level:
            nxt = []
            for clique in level:
                for k in range(clique[-1] + 1, m):
                    if all(linked[k, i] for i in clique):
                        cand = clique + (k,)
                        cube = _span(v, [(edges[i][0], edges[i][1]) for i in cand])
                        if not complex.has_cell(cube):
                            return LinkReport(False, v, tuple(edges[i][2] for i in cand))
                        nxt.append(cand)
            level = nxt
    return LinkReport(True)


def check_simply_connected(complex: CubicalComplex) -> str:
    """Return 'yes', 'no' or 'unknown'.

    Decided exactly for graphs and for complexes in Z^1 or Z^2 (a connected
    complex of dimension <= 2 in the plane is simply connected iff its Euler
    characteristic is 1), and for complexes with a core.  Anything else is
    'unknown'.
    """
    from .corebook import find_core

    if complex.dim <= 1 or complex.ambient_dim <= 2:
        return "yes" if complex.euler_characteristic() == 1 else "no"
    if find_core(complex) is not None:
        return "yes"
    return "unknown"

"""Intrinsic distances and geodesic polylines in lattice cubical complexes.

Three routes, tried in order:

1. both points in one cube: the straight segment;
2. complexes with a core, or 1-dimensional complexes: closed forms
   (see :mod:`cubeopt.corebook`) and graph shortest paths;
3. otherwise a best-first search over simple sequences of maximal cubes.
   Each sequence is scored by its "rubber band": the shortest polyline whose
   breakpoints lie in the faces shared by consecutive cubes.  The band length
   of a prefix is a lower bound for every extension, so the first complete
   sequence popped is optimal.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .complex import CubicalComplex, MembershipError, MEMBERSHIP_TOL

MAX_ENUMERATION_CUBES = 12
ZERO_SEGMENT = 1e-11
TIE_TOL = 1e-9
_SNAP_LEVELS = (1e-4, 1e-5, 1e-6, 1e-7)


class GeodesicError(RuntimeError):
    """Geodesic computation failed; ``best`` holds the best path found, if any."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


@dataclass(frozen=True)
class GeodesicPath:
    breakpoints: np.ndarray  # (m, N), first = source, last = target
    cell_sequence: tuple[int, ...]  # one maximal cube index per segment
    length: float

    @property
    def source(self) -> np.ndarray:
        return self.breakpoints[0]

    @property
    def target(self) -> np.ndarray:
        return self.breakpoints[-1]

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.breakpoints, axis=0), axis=1)

    def to_json(self) -> dict:
        return {
            "length": float(self.length),
            "breakpoints": self.breakpoints.tolist(),
            "cells": list(self.cell_sequence),
        }


def _polyline_length(pts: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


# ---------------------------------------------------------------------------
# rubber band over a fixed sequence of boxes


def _band_closed_form(x, lo, hi, y):
    """One box: exact when the box has <= 1 free axis or the unconstrained
    minimiser over its affine hull lies inside it."""
    free = hi > lo
    xa = np.where(free, x, lo)
    ya = np.where(free, y, lo)
    rx = np.linalg.norm(x - xa)
    ry = np.linalg.norm(y - ya)
    if rx + ry == 0.0:
        if free.sum() > 1:
            return None
        z = np.clip(x, lo, hi)
    else:
        z = (ry * xa + rx * ya) / (rx + ry)
        if free.sum() > 1 and not (np.all(z >= lo) and np.all(z <= hi)):
            return None
        z = np.clip(z, lo, hi)
    return z[None, :]


def _band_socp(x, lo, hi, y, tol):
    import clarabel

    k, n = lo.shape
    free = hi > lo
    col = -np.ones((k, n), dtype=int)
    col[free] = np.arange(free.sum())
    nz = int(free.sum())
    nseg = k + 1
    nvar = nz + nseg

    rows, cols, vals, b = [], [], [], []
    cones = []
    pts_const = np.vstack([x, np.where(free, 0.0, lo), y])
    pts_col = np.vstack([-np.ones((1, n), int), col, -np.ones((1, n), int)])
    r = 0
    for j in range(nseg):
        # s = (t_j, p_j - p_{j+1}) in SOC, written as s = b - A v
        rows.append(r)
        cols.append(nz + j)
        vals.append(-1.0)
        b.append(0.0)
        for d in range(n):
            if pts_col[j, d] >= 0:
                rows.append(r + 1 + d)
                cols.append(pts_col[j, d])
                vals.append(-1.0)
            if pts_col[j + 1, d] >= 0:
                rows.append(r + 1 + d)
                cols.append(pts_col[j + 1, d])
                vals.append(1.0)
            b.append(pts_const[j, d] - pts_const[j + 1, d])
        cones.append(clarabel.SecondOrderConeT(n + 1))
        r += n + 1
    idx = np.arange(nz)
    rows.extend(r + idx)
    cols.extend(idx)
    vals.extend(np.ones(nz))
    b.extend(hi[free])
    rows.extend(r + nz + idx)
    cols.extend(idx)
    vals.extend(-np.ones(nz))
    b.extend(-lo[free])
    cones.append(clarabel.NonnegativeConeT(2 * nz))

    A = sp.csc_matrix((vals, (rows, cols)), shape=(r + 2 * nz, nvar))
    P = sp.csc_matrix((nvar, nvar))
    q = np.concatenate([np.zeros(nz), np.ones(nseg)])
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = tol
    settings.tol_gap_rel = tol
    settings.tol_feas = tol
    sol = clarabel.DefaultSolver(P, q, A, np.asarray(b, dtype=float), cones, settings).solve()
    status = str(sol.status)
    if "Solved" not in status:
        raise GeodesicError(f"rubber band solver returned {status}")
    z = np.asarray(sol.x)[:nz]
    pts = lo.copy()
    pts[free] = z
    return np.clip(pts, lo, hi)


def _polish(x, lo, hi, y, pts, snap):
    """Snap near-active bounds, merge near-coincident breakpoints, then
    Newton-refine the remaining free coordinates."""
    k, n = pts.shape
    pts = pts.copy()
    pts = np.where(np.abs(pts - lo) < snap, lo, pts)
    pts = np.where(np.abs(pts - hi) < snap, hi, pts)
    # variable map: var[i, d] = index into z, or -1 when fixed
    var = -np.ones((k, n), dtype=int)
    group = list(range(k))
    glo, ghi = lo.copy(), hi.copy()
    for i in range(k - 1):
        if np.linalg.norm(pts[i] - pts[i + 1]) < snap:
            g = group[i]
            nlo = np.maximum(glo[g], lo[i + 1])
            nhi = np.minimum(ghi[g], hi[i + 1])
            if np.all(nlo <= nhi):
                glo[g], ghi[g] = nlo, nhi
                group[i + 1] = g
    for i in range(k):
        g = group[i]
        if g != i:
            continue
        members = [j for j in range(k) if group[j] == g]
        m = np.clip(np.mean(pts[members], axis=0), glo[g], ghi[g])
        for j in members:
            pts[j] = m
    nvar = 0
    for i in range(k):
        g = group[i]
        if g != i:
            var[i] = var[g]
            continue
        for d in range(n):
            if glo[g, d] < pts[i, d] < ghi[g, d]:
                var[i, d] = nvar
                nvar += 1
    full = np.vstack([x, pts, y])
    if nvar == 0:
        return pts
    fvar = np.vstack([-np.ones((1, n), int), var, -np.ones((1, n), int)])
    z = np.zeros(nvar)
    mask = fvar >= 0
    z[fvar[mask]] = full[mask]
    vlo = np.zeros(nvar)
    vhi = np.zeros(nvar)
    blo = np.vstack([x, np.array([glo[group[i]] for i in range(k)]), y])
    bhi = np.vstack([x, np.array([ghi[group[i]] for i in range(k)]), y])
    vlo[fvar[mask]] = blo[mask]
    vhi[fvar[mask]] = bhi[mask]

    def assemble(zv):
        q = full.copy()
        q[mask] = zv[fvar[mask]]
        return q

    def objective(zv):
        return _polyline_length(assemble(zv))

    cur = objective(z)
    for _ in range(20):
        q = assemble(z)
        grad = np.zeros(nvar)
        hess = np.zeros((nvar, nvar))
        for j in range(k + 1):
            d = q[j] - q[j + 1]
            ell = np.linalg.norm(d)
            if ell < 1e-14:
                continue
            u = d / ell
            H = (np.eye(n) - np.outer(u, u)) / ell
            ia, ib = fvar[j], fvar[j + 1]
            sa, sb = ia >= 0, ib >= 0
            grad[ia[sa]] += u[sa]
            grad[ib[sb]] -= u[sb]
            hess[np.ix_(ia[sa], ia[sa])] += H[np.ix_(sa, sa)]
            hess[np.ix_(ib[sb], ib[sb])] += H[np.ix_(sb, sb)]
            hess[np.ix_(ia[sa], ib[sb])] -= H[np.ix_(sa, sb)]
            hess[np.ix_(ib[sb], ia[sa])] -= H[np.ix_(sb, sa)]
        if np.linalg.norm(grad) < 1e-15:
            break
        reg = 1e-12 * max(1.0, np.trace(hess))
        try:
            step = -np.linalg.solve(hess + reg * np.eye(nvar), grad)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-8:
            cand = np.clip(z + t * step, vlo, vhi)
            val = objective(cand)
            if val <= cur:
                break
            t *= 0.5
        else:
            break
        if cur - val < 1e-16 and np.max(np.abs(cand - z)) < 1e-15:
            z = cand
            break
        z, cur = cand, val
    return assemble(z)[1:-1]


def band(x, lo, hi, y, tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Shortest polyline x -> p_1 -> ... -> p_k -> y with p_i in box i.

    Returns the length and the full polyline (k + 2 points).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo = np.asarray(lo, dtype=float).reshape(-1, x.shape[0])
    hi = np.asarray(hi, dtype=float).reshape(-1, x.shape[0])
    k = lo.shape[0]
    if k == 0:
        pts = np.vstack([x, y])
        return _polyline_length(pts), pts
    if not np.any(hi > lo):
        inner = lo
    else:
        inner = _band_closed_form(x, lo[0], hi[0], y) if k == 1 else None
        if inner is None:
            raw = _band_socp(x, lo, hi, y, tol)
            raw_len = _polyline_length(np.vstack([x, raw, y]))
            inner = raw
            # coarse snaps first; a wrong snap shows up as a longer path
            for snap in _SNAP_LEVELS:
                cand = _polish(x, lo, hi, y, raw, snap)
                if _polyline_length(np.vstack([x, cand, y])) <= raw_len + 1e-13:
                    inner = cand
                    break
    pts = np.vstack([x, inner, y])
    return _polyline_length(pts), pts


def _sequence_boxes(complex: CubicalComplex, seq):
    faces = [complex.faces_between[a, b] for a, b in zip(seq[:-1], seq[1:])]
    n = complex.ambient_dim
    lo = np.array([f.lo for f in faces]).reshape(-1, n)
    hi = np.array([f.hi for f in faces]).reshape(-1, n)
    return lo, hi


def rubber_band(complex: CubicalComplex, sequence, x, y, tol: float = 1e-10, max_iter: int = 100000):
    """Shortest path from x to y through a fixed sequence of maximal cubes.

    ``sequence`` holds cube indices; consecutive cubes must intersect, x must
    lie in the first and y in the last.  Breakpoints are constrained to the
    shared faces.  Returns ``(length, polyline)`` with the polyline including
    both endpoints.  ``max_iter`` is accepted for interface compatibility; the
    conic solver has its own iteration control.
    """
    seq = [int(s) for s in sequence]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not complex.cubes[seq[0]].contains(x):
        raise MembershipError("x is not in the first cube of the sequence")
    if not complex.cubes[seq[-1]].contains(y):
        raise MembershipError("y is not in the last cube of the sequence")
    for a, b in zip(seq[:-1], seq[1:]):
        if (a, b) not in complex.faces_between:
            raise ValueError(f"cubes {a} and {b} do not intersect")
    lo, hi = _sequence_boxes(complex, seq)
    return band(x, lo, hi, y, tol=tol)


# ---------------------------------------------------------------------------
# path clean-up


def _clean(complex: CubicalComplex, pts: np.ndarray) -> GeodesicPath:
    # Drop breakpoints that sit on their predecessor, unless the neighbours
    # left behind would no longer share a cube (a point just off a vertex).
    keep = [pts[0]]
    last = len(pts) - 1
    for k in range(1, last + 1):
        p = pts[k]
        if np.linalg.norm(p - keep[-1]) > ZERO_SEGMENT:
            keep.append(p)
        elif k == last:
            if len(keep) > 1 and complex.common_cube(keep[-2], p) is not None:
                keep[-1] = p
            else:
                keep.append(p)
        elif complex.common_cube(keep[-1], pts[k + 1]) is None:
            keep.append(p)
    pts = np.array(keep)
    if len(pts) > 2:
        masks = [complex.membership_mask(p) for p in pts]
        out, cells = [pts[0]], []
        i = 0
        while i < len(pts) - 1:
            j = len(pts) - 1
            while j > i + 1 and not (masks[i] & masks[j]).any():
                j -= 1
            common = np.flatnonzero(masks[i] & masks[j])
            cells.append(int(common[0]) if common.size else -1)
            out.append(pts[j])
            i = j
        pts = np.array(out)
    else:
        c = complex.common_cube(pts[0], pts[-1])
        cells = [c if c is not None else -1]
    if len(pts) == 2 and np.linalg.norm(pts[1] - pts[0]) <= ZERO_SEGMENT:
        cells = [int(np.flatnonzero(complex.membership_mask(pts[0]))[0])]
    return GeodesicPath(pts, tuple(cells), _polyline_length(pts))


# ---------------------------------------------------------------------------
# search over cube sequences


def _enumerate(complex: CubicalComplex, x, y, tol):
    if len(complex.cubes) > MAX_ENUMERATION_CUBES:
        raise ValueError(
            f"general geodesics are limited to {MAX_ENUMERATION_CUBES} maximal cubes "
            f"(complex has {len(complex.cubes)} and no core)"
        )
    start = np.flatnonzero(complex.membership_mask(x))
    targets = set(np.flatnonzero(complex.membership_mask(y)).tolist())
    d0 = float(np.linalg.norm(x - y))
    heap = [(d0, (int(c),), np.vstack([x, y])) for c in start]
    heapq.heapify(heap)
    best = None
    done = []
    while heap:
        bound, seq, pts = heapq.heappop(heap)
        if best is not None and bound > best + TIE_TOL:
            break
        if seq[-1] in targets:
            done.append((seq, bound, pts))
            if best is None or bound < best:
                best = bound
            continue
        for nb in complex.adjacency[seq[-1]]:
            if nb in seq:
                continue
            new = seq + (nb,)
            lo, hi = _sequence_boxes(complex, new)
            length, poly = band(x, lo, hi, y, tol=tol)
            if best is not None and length > best + TIE_TOL:
                continue
            heapq.heappush(heap, (length, new, poly))
    if not done:
        raise GeodesicError("no cube sequence joins the two points")
    cands = sorted((len(s), s, p) for s, L, p in done if L <= best + TIE_TOL)
    return cands[0][2]


def _graph_path(complex: CubicalComplex, x, y) -> np.ndarray:
    """Shortest path in a 1-dimensional complex (a metric graph)."""
    from scipy.sparse.csgraph import dijkstra

    verts = sorted({v for c in complex.cubes for v in c.vertices()})
    index = {v: i for i, v in enumerate(verts)}
    nv = len(verts)
    rows, cols = [], []
    for c in complex.cubes:
        if c.dim == 1:
            a, b = (index[v] for v in c.vertices())
            rows += [a, b]
            cols += [b, a]
    # two extra nodes for x and y
    ends = []
    for p in (x, y):
        cube = complex.cubes[int(np.flatnonzero(complex.membership_mask(p))[0])]
        ends.append([(index[v], float(np.linalg.norm(p - np.array(v)))) for v in cube.vertices()])
    data = [1.0] * len(rows)
    for node, links in ((nv, ends[0]), (nv + 1, ends[1])):
        for v, w in links:
            rows += [node, v]
            cols += [v, node]
            data += [max(w, 1e-300)] * 2
    g = sp.csr_matrix((data, (rows, cols)), shape=(nv + 2, nv + 2))
    dist, pred = dijkstra(g, indices=nv, return_predecessors=True)
    path = []
    node = nv + 1
    while node != nv:
        path.append(node)
        node = pred[node]
        if node < 0:
            raise GeodesicError("points are not connected")
    pts = [x] + [np.array(verts[i], dtype=float) for i in reversed(path[1:])] + [y]
    return np.array(pts)


def geodesic(complex: CubicalComplex, x, y, method: str = "auto", tol: float = 1e-10) -> GeodesicPath:
    """The geodesic from x to y as a polyline.

    ``method`` is ``"auto"`` (straight / core / graph / search, in that
    order) or ``"enumerate"`` to force the cube-sequence search.  Among
    sequences of equal length (within 1e-9) the search keeps the one with
    fewest cubes, then the lexicographically smallest.
    """
    x = complex.check_point(x)
    y = complex.check_point(y)
    if complex.common_cube(x, y) is not None:
        return _clean(complex, np.vstack([x, y]))
    if method == "auto":
        from .corebook import core_geodesic, find_core

        info = find_core(complex)
        if info is not None:
            return core_geodesic(complex, info, x, y)
        if complex.dim <= 1:
            return _clean(complex, _graph_path(complex, x, y))
    elif method != "enumerate":
        raise ValueError(f"unknown geodesic method {method!r}")
    return _clean(complex, _enumerate(complex, x, y, tol))


def distance(complex: CubicalComplex, x, y, **kw) -> float:
    return geodesic(complex, x, y, **kw).length


def point_along(path: GeodesicPath, t: float) -> np.ndarray:
    """Point at arclength t from the source."""
    L = path.length
    if t < -1e-12 or t > L + 1e-12:
        raise ValueError(f"arclength {t} outside [0, {L}]")
    if t <= 0:
        return path.source.copy()
    if t >= L:
        return path.target.copy()
    seg = path.segment_lengths
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    i = int(np.searchsorted(cum, t, side="right") - 1)
    i = min(i, len(seg) - 1)
    if seg[i] == 0:
        return path.breakpoints[i + 1].copy()
    s = (t - cum[i]) / seg[i]
    p, q = path.breakpoints[i], path.breakpoints[i + 1]
    return p + s * (q - p)

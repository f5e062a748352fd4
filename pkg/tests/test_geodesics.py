import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubeopt.complex import MembershipError, check_simply_connected, complex_from_dict
from cubeopt.geodesics import band, distance, geodesic, point_along, rubber_band
from oracles import (
    BOOK_COMPLEX,
    L_COMPLEX,
    PQST_COMPLEX,
    grid_distances,
    polyomino_complex,
    random_point,
    random_polyomino,
)

SQ2 = np.sqrt(2)


@pytest.fixture(scope="module")
def L():
    return complex_from_dict(L_COMPLEX)


@pytest.fixture(scope="module")
def pqst():
    return complex_from_dict(PQST_COMPLEX)


def test_bent_geodesic(L):
    path = geodesic(L, [-1, 1], [1, -1])
    assert path.length == pytest.approx(2 * SQ2, abs=1e-12)
    assert np.allclose(path.breakpoints, [[-1, 1], [0, 0], [1, -1]], atol=1e-12)
    assert path.cell_sequence == (0, 2)


def test_trivial_cases(L):
    assert distance(L, [-0.3, 0.2], [-0.3, 0.2]) == 0
    assert distance(L, [-0.9, 0.1], [-0.2, 0.8]) == pytest.approx(np.hypot(0.7, 0.7))


def test_two_segment_geodesic(pqst):
    path = geodesic(pqst, [0.5, 0], [-0.5, -2])
    assert np.allclose(path.breakpoints, [[0.5, 0], [0, -1], [-0.5, -2]], atol=1e-9)
    # frozen from the grid oracle: 2.23606..., i.e. sqrt(5)
    assert path.length == pytest.approx(np.sqrt(5), abs=1e-9)
    assert grid_distances(pqst, [[0.5, 0]], [[-0.5, -2]])[0, 0] == pytest.approx(np.sqrt(5), abs=2 / 64)
    assert np.allclose(point_along(path, np.sqrt(5) / 2), [0, -1], atol=1e-9)


def test_rubber_band(L, pqst):
    length, pts = rubber_band(L, [0], [-1, 1], [-0.5, 0.5])
    assert len(pts) == 2 and length == pytest.approx(np.hypot(0.5, 0.5))
    length, pts = rubber_band(L, [0, 2], [-1, 1], [1, -1])
    assert length == pytest.approx(2 * SQ2) and np.allclose(pts[1], [0, 0])
    length, pts = rubber_band(pqst, [1, 3], [0.5, -0.5], [-0.5, -2])
    assert np.allclose(pts[1], [0, -1])
    with pytest.raises(MembershipError):
        rubber_band(L, [2], [-1, 1], [1, -1])
    with pytest.raises(ValueError):
        rubber_band(pqst, [0, 3], [0.5, 0.5], [-0.5, -2])


def test_band_halving_tolerance():
    lo = np.array([[0, 0, 0], [1, 0, 0]], float)
    hi = np.array([[0, 1, 1], [1, 1, 0]], float)
    x, y = np.array([-1.0, 0.3, 0.9]), np.array([2.0, 0.7, -0.4])
    a, _ = band(x, lo, hi, y, tol=1e-8)
    b, _ = band(x, lo, hi, y, tol=5e-9)
    assert b <= a + 1e-8


def test_book_geodesic_matches_search():
    cx = complex_from_dict(BOOK_COMPLEX)
    x, y = [0.5, 0, 0.5], [0, 0.5, 0.5]
    closed = geodesic(cx, x, y)
    searched = geodesic(cx, x, y, method="enumerate")
    assert closed.length == pytest.approx(1.0, abs=1e-12)
    assert searched.length == pytest.approx(closed.length, abs=1e-9)
    assert np.allclose(closed.breakpoints[1], [0, 0, 0.5])


def test_point_along(L):
    path = geodesic(L, [-1, 1], [1, -1])
    assert np.array_equal(point_along(path, 0), [-1, 1])
    assert np.array_equal(point_along(path, path.length), [1, -1])
    assert np.allclose(point_along(path, SQ2), [0, 0])
    seg = geodesic(L, [-1, 0], [-1, 1])
    assert np.allclose(point_along(seg, 0.5), [-1, 0.5])
    with pytest.raises(ValueError):
        point_along(path, 3)


def test_membership_errors(L):
    with pytest.raises(MembershipError):
        geodesic(L, [0.5, 0.5], [0, 0])


def test_path_invariants(L):
    rng = np.random.default_rng(3)
    for _ in range(30):
        x = random_point(rng, L.cubes[rng.integers(3)])
        y = random_point(rng, L.cubes[rng.integers(3)])
        p = geodesic(L, x, y)
        seg = p.segment_lengths
        assert np.all(seg > 1e-11) or len(seg) == 1
        assert p.length == pytest.approx(seg.sum())
        assert p.length >= np.linalg.norm(x - y) - 1e-12
        for (a, b), c in zip(zip(p.breakpoints[:-1], p.breakpoints[1:]), p.cell_sequence):
            assert L.cubes[c].contains(a) and L.cubes[c].contains(b)


def _random_complex(seed):
    rng = np.random.default_rng(seed)
    cx = complex_from_dict(polyomino_complex(random_polyomino(rng, 6)))
    return cx, rng


def _pts(cx, rng, k):
    return [random_point(rng, cx.cubes[rng.integers(len(cx.cubes))]) for _ in range(k)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_metric_properties(seed):
    cx, rng = _random_complex(seed)
    x, y, z = _pts(cx, rng, 3)
    dxy, dyx = distance(cx, x, y), distance(cx, y, x)
    assert abs(dxy - dyx) <= 1e-8
    assert distance(cx, x, z) <= dxy + distance(cx, y, z) + 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_cat0_midpoint_inequality(seed):
    cx, rng = _random_complex(seed)
    if check_simply_connected(cx) != "yes":
        return
    x, y, z = _pts(cx, rng, 3)
    path = geodesic(cx, x, y)
    m = point_along(path, path.length / 2)
    lhs = distance(cx, m, z) ** 2
    rhs = 0.5 * distance(cx, x, z) ** 2 + 0.5 * distance(cx, y, z) ** 2 - 0.25 * path.length**2
    assert lhs <= rhs + 1e-7


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_grid_oracle_agreement(seed):
    cx, rng = _random_complex(seed)
    if check_simply_connected(cx) != "yes":
        return
    xs, ys = _pts(cx, rng, 10), _pts(cx, rng, 10)
    grid = np.diag(grid_distances(cx, xs, ys))
    ours = np.array([distance(cx, x, y) for x, y in zip(xs, ys)])
    assert np.all(np.abs(ours - grid) <= 2 / 64)
    assert np.all(ours <= grid + 1e-9)

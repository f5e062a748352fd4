import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubeopt.complex import Cube, MembershipError, complex_from_dict, cube_intersection
from cubeopt.geodesics import distance, geodesic
from cubeopt.subgradient import cosine_bound_check, distance_subgradient, initial_segment
from oracles import L_COMPLEX, PQST_COMPLEX, polyomino_complex, random_point, random_polyomino


@pytest.fixture(scope="module")
def pqst():
    return complex_from_dict(PQST_COMPLEX)


@pytest.fixture(scope="module")
def L():
    return complex_from_dict(L_COMPLEX)


def test_worked_example(pqst):
    P = pqst.cubes[0]
    g = distance_subgradient(pqst, P, [0.5, 0], [-0.5, -2])
    assert np.allclose(g.vector, [1 / np.sqrt(5), 0], atol=1e-12)
    assert g.distance == pytest.approx(np.sqrt(5))


def test_initial_segment(pqst, L):
    path = geodesic(pqst, [0.5, 0], [-0.5, -2])
    y, Q = initial_segment(path, pqst.cubes[0], pqst)
    assert np.allclose(y, [0, -1]) and Q == Cube((0, -1), (0, 1))

    path = geodesic(pqst, [0.5, 0.5], [0.2, 0.9])
    y, Q = initial_segment(path, pqst.cubes[0], pqst)
    assert np.allclose(y, [0.2, 0.9]) and Q == pqst.cubes[0]

    path = geodesic(L, [0, 0], [0.5, -0.5])
    y, Q = initial_segment(path, L.cubes[1], L)
    assert np.allclose(y, [0.5, -0.5]) and Q == L.cubes[2]
    assert cube_intersection(L.cubes[1], Q) == Cube((0, -1), (1,))

    with pytest.raises(ValueError):
        initial_segment(geodesic(L, [0, 0], [0, 0]), L.cubes[0], L)


def test_three_dimensional_example():
    cx = complex_from_dict(
        {
            "ambient_dim": 3,
            "maximal_cubes": [{"base": [0, 0, 0], "axes": [0, 1, 2]}, {"base": [-1, 0, 0], "axes": [0, 1]}],
        }
    )
    P, Q = cx.cubes
    F = cube_intersection(P, Q)
    y = np.array([-1, 2 / 3, 0])
    assert np.array_equal(F.clamp(y), [0, 2 / 3, 0])
    g = distance_subgradient(cx, P, [0, 1 / 3, 0], y)
    # cos(angle yxz) = 1/sqrt(10), |x - z| = 1/3, x - z = (0, -1/3, 0)
    assert np.allclose(g.vector, [0, -1 / np.sqrt(10), 0], atol=1e-12)


def test_zero_cases(L):
    assert not distance_subgradient(L, L.cubes[0], [-0.5, 0.5], [-0.5, 0.5]).vector.any()
    # z = x: the anchor is reached straight through x's own corner
    assert not distance_subgradient(L, L.cubes[0], [0, 0], [1, -1]).vector.any()
    with pytest.raises(MembershipError):
        distance_subgradient(L, L.cubes[0], [0.5, -0.5], [0, 0])


def test_smooth_case(L):
    x, a = np.array([-0.7, 0.2]), np.array([-0.1, 0.9])
    g = distance_subgradient(L, L.cubes[0], x, a).vector
    assert np.allclose(g, (x - a) / np.linalg.norm(x - a))


def test_cosine_bound_examples(L):
    lhs, rhs = cosine_bound_check(L, [-0.1, 0.1], [-0.9, 0.9], [-0.5, 0.5])
    assert lhs == pytest.approx(1) and rhs == pytest.approx(1)
    lhs, rhs = cosine_bound_check(L, [-0.5, 0.9], [-0.5, 0.5], [-0.9, 0.5])
    assert lhs <= 1e-12 and rhs == pytest.approx(0, abs=1e-12)
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, x, w = (random_point(rng, L.cubes[rng.integers(3)]) for _ in range(3))
        lhs, rhs = cosine_bound_check(L, a, x, w)
        assert lhs <= rhs + 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_subgradient_inequality_and_norm(seed):
    rng = np.random.default_rng(seed)
    cx = complex_from_dict(polyomino_complex(random_polyomino(rng, 6)))
    P = cx.cubes[rng.integers(len(cx.cubes))]
    a = random_point(rng, cx.cubes[rng.integers(len(cx.cubes))])
    x = random_point(rng, P)
    sg = distance_subgradient(cx, P, x, a)
    assert np.linalg.norm(sg.vector) <= 1 + 1e-12
    dx = distance(cx, a, x)
    for _ in range(20):
        w = random_point(rng, P)
        assert sg.vector @ (w - x) <= distance(cx, a, w) - dx + 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_angle_product_inequality(seed):
    rng = np.random.default_rng(seed)
    cx = complex_from_dict(polyomino_complex(random_polyomino(rng, 6)))
    P = cx.cubes[rng.integers(len(cx.cubes))]
    a = random_point(rng, cx.cubes[rng.integers(len(cx.cubes))])
    x = random_point(rng, P)
    path = geodesic(cx, x, a)
    if path.length < 1e-9:
        return
    y, Q = initial_segment(path, P, cx)
    z = cube_intersection(P, Q).clamp(y)
    if np.linalg.norm(z - x) < 1e-9:
        return

    def cos(u, v):
        return u @ v / (np.linalg.norm(u) * np.linalg.norm(v))

    for _ in range(20):
        w = random_point(rng, P)
        if np.linalg.norm(w - x) < 1e-9:
            continue
        assert cos(y - x, w - x) <= cos(y - x, z - x) * cos(z - x, w - x) + 1e-8

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubeopt.decomposition import minimize
from cubeopt.objectives import Objective
from cubeopt.trees import (
    MetricTree,
    TreePoint,
    embed_tree,
    load_tree,
    mean_value,
    tree_distance,
    tree_mean,
    tree_mean_walk,
    tree_to_json,
)

SPIDER = MetricTree.from_edges(["o", "a", "b", "c"], [("o", "a"), ("o", "b"), ("o", "c")])


def random_tree(rng, max_edges=10):
    ne = int(rng.integers(1, max_edges + 1))
    names = [f"v{i}" for i in range(ne + 1)]
    edges = [(names[int(rng.integers(0, i))], names[i]) for i in range(1, ne + 1)]
    return MetricTree.from_edges(names, edges)


def random_tree_point(rng, tree):
    e = tree.edges[int(rng.integers(len(tree.edges)))]
    return TreePoint(e, e[int(rng.integers(2))], float(rng.random()))


def spider_points(a):
    return [TreePoint(("o", leg), "o", ai) for leg, ai in zip("abc", a)]


def test_tree_validation():
    with pytest.raises(ValueError):
        MetricTree.from_edges(["a", "b", "c"], [("a", "b")])
    with pytest.raises(ValueError):
        MetricTree.from_edges(["a", "b", "c", "d"], [("a", "b"), ("b", "a"), ("c", "d")])
    with pytest.raises(ValueError):
        TreePoint(("a", "b"), "c", 0.5)
    with pytest.raises(ValueError):
        TreePoint(("a", "b"), "a", 1.5)


def test_distances():
    centre = TreePoint(("o", "a"), "o", 0.0)
    assert tree_distance(SPIDER, centre, TreePoint(("o", "b"), "o", 0.5)) == 0.5
    p = TreePoint(("o", "b"), "b", 0.3)
    assert tree_distance(SPIDER, p, p) == 0
    path = MetricTree.from_edges(["v0", "v1", "v2"], [("v0", "v1"), ("v1", "v2")])
    p = TreePoint(("v0", "v1"), "v0", 0.3)
    q = TreePoint(("v1", "v2"), "v1", 0.4)
    assert tree_distance(path, p, q) == pytest.approx(1.1)
    # same edge, opposite orientation
    assert tree_distance(path, p, TreePoint(("v0", "v1"), "v1", 0.3)) == pytest.approx(0.4)


def test_spider_mean_is_centre():
    m, visited = tree_mean_walk(SPIDER, spider_points([0.5, 0.5, 0.5]))
    assert m.vertex() == "o"
    assert len(visited) == 3


def test_singleton_mean():
    p = TreePoint(("o", "b"), "o", 0.25)
    m = tree_mean(SPIDER, [p])
    assert tree_distance(SPIDER, m, p) == 0


def test_walk_from_a_leaf():
    tree = MetricTree.from_edges(["a", "z", "y", "x"], [("a", "z"), ("z", "y"), ("z", "x")])
    pts = [TreePoint(("a", "z"), "z", 0.5), TreePoint(("z", "y"), "z", 0.5), TreePoint(("z", "x"), "z", 0.5)]
    assert tree_mean(tree, pts).vertex() == "z"


def test_json_round_trip():
    pts = spider_points([0.1, 0.2, 0.3])
    tree, back = load_tree(json.dumps(tree_to_json(SPIDER, pts)))
    assert tree == SPIDER and back == pts


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-0.04, 0.04), min_size=3, max_size=3))
def test_stickiness(eps):
    m = tree_mean(SPIDER, spider_points(0.5 + np.array(eps)))
    assert m.vertex() == "o" and m.delta == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_mean_beats_random_points(seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng)
    pts = [random_tree_point(rng, tree) for _ in range(int(rng.integers(1, 9)))]
    m, visited = tree_mean_walk(tree, pts)
    assert len(visited) == len({frozenset(e) for e in visited}) <= len(tree.edges)
    best = mean_value(tree, pts, m)
    for _ in range(1000):
        assert best <= mean_value(tree, pts, random_tree_point(rng, tree)) + 1e-12


def test_embedding_round_trip():
    rng = np.random.default_rng(5)
    tree = random_tree(rng)
    emb = embed_tree(tree)
    assert emb.complex.ambient_dim == len(tree.edges)
    for _ in range(50):
        p = random_tree_point(rng, tree)
        q = emb.locate(emb.embed(p))
        assert tree_distance(tree, p, q) < 1e-12


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_matches_lattice_pipeline(seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng, 6)
    pts = [random_tree_point(rng, tree) for _ in range(int(rng.integers(1, 6)))]
    emb = embed_tree(tree)
    rep = minimize(emb.complex, Objective.mean([emb.embed(p) for p in pts]), emb.embed(pts[0]))
    assert tree_distance(tree, tree_mean(tree, pts), emb.locate(rep.minimizer)) < 1e-6

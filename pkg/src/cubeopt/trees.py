"""Finite metric trees with unit edges and their exact mean.

The mean walk starts at a vertex and looks along each incident edge e = vv'.
On e (v at 0, v' at 1) every anchor's distance is |x - s_a| with
s_a = d(a, v) when the anchor lies beyond v and s_a = -d(a, v) otherwise,
so the restricted mean is the average of the s_a.  If it lands inside the
edge we are done, if it lands past v' we walk to v', and otherwise the edge
is discarded.  Each edge is looked at most once.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from .complex import Cube, CubicalComplex

BEYOND_TOL = 1e-12


@dataclass(frozen=True)
class MetricTree:
    vertices: tuple
    edges: tuple

    @classmethod
    def from_edges(cls, vertices: Iterable[Hashable], edges: Iterable[Sequence[Hashable]]) -> "MetricTree":
        vertices = tuple(vertices)
        edges = tuple(tuple(e) for e in edges)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex labels")
        known = set(vertices)
        for e in edges:
            if len(e) != 2 or e[0] == e[1] or not set(e) <= known:
                raise ValueError(f"bad edge {e!r}")
        if len({frozenset(e) for e in edges}) != len(edges):
            raise ValueError("repeated edge")
        if len(edges) != len(vertices) - 1:
            raise ValueError("a tree on V vertices has V - 1 edges")
        tree = cls(vertices, edges)
        if len(tree._bfs(vertices[0])) != len(vertices):
            raise ValueError("tree is not connected")
        return tree

    @cached_property
    def neighbors(self) -> dict:
        nb = {v: [] for v in self.vertices}
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return {v: sorted(ns, key=str) for v, ns in nb.items()}

    @cached_property
    def edge_index(self) -> dict:
        return {frozenset(e): i for i, e in enumerate(self.edges)}

    def _bfs(self, root) -> dict:
        dist = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in self.neighbors[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    @cached_property
    def hops(self) -> dict:
        return {v: self._bfs(v) for v in self.vertices}

    @property
    def root(self):
        return min(self.vertices, key=str)

    def has_edge(self, u, v) -> bool:
        return frozenset((u, v)) in self.edge_index


@dataclass(frozen=True)
class TreePoint:
    edge: tuple
    start: Hashable
    delta: float

    def __post_init__(self):
        if len(self.edge) != 2 or self.start not in self.edge:
            raise ValueError("start must be an endpoint of the edge")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        object.__setattr__(self, "edge", tuple(self.edge))

    @property
    def end(self):
        return self.edge[1] if self.edge[0] == self.start else self.edge[0]

    @classmethod
    def at_vertex(cls, tree: MetricTree, v) -> "TreePoint":
        w = tree.neighbors[v][0]
        return cls((v, w), v, 0.0)

    def vertex(self, tol: float = 0.0):
        """The vertex this point sits on, or None."""
        if self.delta <= tol:
            return self.start
        if self.delta >= 1 - tol:
            return self.end
        return None

    def to_json(self) -> dict:
        return {"edge": list(self.edge), "from": self.start, "delta": self.delta}

    @classmethod
    def from_json(cls, d: dict) -> "TreePoint":
        return cls(tuple(d["edge"]), d["from"], float(d["delta"]))


def _check_point(tree: MetricTree, p: TreePoint) -> None:
    if not tree.has_edge(*p.edge):
        raise ValueError(f"{p.edge!r} is not an edge of the tree")


def vertex_distance(tree: MetricTree, v, p: TreePoint) -> float:
    _check_point(tree, p)
    h = tree.hops[v]
    return float(min(h[p.start] + p.delta, h[p.end] + 1 - p.delta))


def tree_distance(tree: MetricTree, p: TreePoint, q: TreePoint) -> float:
    _check_point(tree, p)
    _check_point(tree, q)
    if frozenset(p.edge) == frozenset(q.edge):
        sq = q.delta if q.start == p.start else 1 - q.delta
        return abs(p.delta - sq)
    return min(
        off + vertex_distance(tree, v, q)
        for v, off in ((p.start, p.delta), (p.end, 1 - p.delta))
    )


def tree_mean_walk(tree: MetricTree, anchors: Sequence[TreePoint]) -> tuple[TreePoint, list[tuple]]:
    """Exact mean of the anchors, with the list of edges examined in order."""
    if not anchors:
        raise ValueError("anchor set is empty")
    for a in anchors:
        _check_point(tree, a)
    m = len(anchors)
    v = tree.root
    done: set[frozenset] = set()
    visited = []
    while True:
        moved = False
        for w in tree.neighbors[v]:
            e = frozenset((v, w))
            if e in done:
                continue
            done.add(e)
            visited.append((v, w))
            s = 0.0
            for a in anchors:
                dv = vertex_distance(tree, v, a)
                dw = vertex_distance(tree, w, a)
                s += dv if dw - dv < 1 - BEYOND_TOL else -dv
            xbar = s / m
            if 0 < xbar < 1:
                return TreePoint((v, w), v, xbar), visited
            if xbar >= 1:
                v = w
                moved = True
                break
        if not moved:
            return TreePoint.at_vertex(tree, v), visited


def tree_mean(tree: MetricTree, anchors: Sequence[TreePoint]) -> TreePoint:
    return tree_mean_walk(tree, anchors)[0]


def mean_value(tree: MetricTree, anchors: Sequence[TreePoint], x: TreePoint) -> float:
    return float(sum(tree_distance(tree, x, a) ** 2 for a in anchors))


def load_tree(data: dict | str) -> tuple[MetricTree, list[TreePoint]]:
    """Parse tree JSON into the tree and its (possibly empty) point list."""
    if isinstance(data, str):
        data = json.loads(data)
    tree = MetricTree.from_edges(data["vertices"], data["edges"])
    points = [TreePoint.from_json(p) for p in data.get("points", [])]
    for p in points:
        _check_point(tree, p)
    return tree, points


def tree_to_json(tree: MetricTree, points: Sequence[TreePoint] = ()) -> dict:
    return {
        "vertices": list(tree.vertices),
        "edges": [list(e) for e in tree.edges],
        "points": [p.to_json() for p in points],
    }


@dataclass(frozen=True)
class TreeEmbedding:
    """A tree as a cubical complex in Z^|E|: edge i is a unit step along axis i."""

    tree: MetricTree
    complex: CubicalComplex
    positions: dict

    def embed(self, p: TreePoint) -> np.ndarray:
        a, b = self.positions[p.start], self.positions[p.end]
        return a + p.delta * (b - a)

    def locate(self, x, tol: float = 1e-9) -> TreePoint:
        x = np.asarray(x, dtype=float)
        for u, v in self.tree.edges:
            a, b = self.positions[u], self.positions[v]
            d = b - a
            t = float(d @ (x - a))
            if -tol <= t <= 1 + tol and np.linalg.norm(a + t * d - x) <= tol:
                return TreePoint((u, v), u, min(max(t, 0.0), 1.0))
        raise ValueError(f"{x.tolist()} is not on the embedded tree")


def embed_tree(tree: MetricTree) -> TreeEmbedding:
    n = len(tree.edges)
    pos = {tree.root: np.zeros(n)}
    cubes = []
    queue = deque([tree.root])
    while queue:
        u = queue.popleft()
        for w in tree.neighbors[u]:
            if w in pos:
                continue
            axis = tree.edge_index[frozenset((u, w))]
            pos[w] = pos[u].copy()
            pos[w][axis] += 1
            cubes.append(Cube(tuple(int(c) for c in pos[u]), (axis,)))
            queue.append(w)
    return TreeEmbedding(tree, CubicalComplex.from_cubes(n, cubes), pos)

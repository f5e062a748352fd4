"""Convex objectives built from distances to a finite anchor set.

* ``power_mean``:   sum_a w_a d_a(x)^q   (q = 2 mean, q = 1 median)
* ``circumcenter``: max_a d_a(x)^2
* ``balls``:        sum_a max(d_a(x) - r_a, 0)
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .complex import Cube, CubicalComplex, MembershipError
from .geodesics import distance
from .subgradient import distance_subgradient

KINDS = ("power_mean", "circumcenter", "balls")


@dataclass(frozen=True)
class Objective:
    kind: str
    anchors: np.ndarray
    q: float = 2.0
    weights: np.ndarray | None = None
    radii: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        if anchors.shape[0] == 0:
            raise ValueError("anchor set is empty")
        object.__setattr__(self, "anchors", anchors)
        m = anchors.shape[0]
        if self.kind == "power_mean":
            if self.q < 1:
                raise ValueError("exponent q must be >= 1")
            w = np.ones(m) if self.weights is None else np.asarray(self.weights, dtype=float)
            if w.shape != (m,) or np.any(w <= 0):
                raise ValueError("need one positive weight per anchor")
            object.__setattr__(self, "weights", w)
        if self.kind == "balls":
            if self.radii is None:
                raise ValueError("balls objective needs radii")
            r = np.asarray(self.radii, dtype=float)
            if r.shape != (m,) or np.any(r <= 0):
                raise ValueError("need one positive radius per anchor")
            object.__setattr__(self, "radii", r)

    @classmethod
    def mean(cls, anchors, weights=None):
        return cls("power_mean", anchors, 2.0, weights)

    @classmethod
    def median(cls, anchors, weights=None):
        return cls("power_mean", anchors, 1.0, weights)

    @classmethod
    def circumcenter(cls, anchors):
        return cls("circumcenter", anchors)

    @classmethod
    def balls(cls, anchors, radii):
        return cls("balls", anchors, radii=radii)

    def __len__(self) -> int:
        return self.anchors.shape[0]

    def check(self, complex: CubicalComplex) -> "Objective":
        for a in self.anchors:
            if not complex.contains(a):
                raise MembershipError(f"anchor {a.tolist()} is not in the complex")
        return self

    def combine(self, dists: np.ndarray) -> float:
        """Objective value from the vector of anchor distances."""
        if self.kind == "power_mean":
            return float(self.weights @ dists**self.q)
        if self.kind == "circumcenter":
            return float(np.max(dists) ** 2)
        return float(np.maximum(dists - self.radii, 0.0).sum())

    def to_json(self) -> dict:
        out = {"kind": self.kind, "anchors": self.anchors.tolist()}
        if self.kind == "power_mean":
            out["q"] = self.q
            out["weights"] = self.weights.tolist()
        if self.kind == "balls":
            out["radii"] = self.radii.tolist()
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "Objective":
        if isinstance(data, str):
            data = json.loads(data)
        kind = data["kind"]
        return cls(
            kind,
            data["anchors"],
            q=float(data.get("q", 2.0)),
            weights=data.get("weights"),
            radii=data.get("radii"),
        )


def evaluate(complex: CubicalComplex, obj: Objective, x) -> float:
    x = complex.check_point(x)
    dists = np.array([distance(complex, a, x) for a in obj.anchors])
    return obj.combine(dists)


def cell_value_subgradient(complex: CubicalComplex, obj: Objective, P: Cube, x) -> tuple[float, np.ndarray]:
    """Value and one subgradient at x of the objective restricted to P."""
    parts = [distance_subgradient(complex, P, x, a) for a in obj.anchors]
    dists = np.array([p.distance for p in parts])
    vs = np.array([p.vector for p in parts])
    value = obj.combine(dists)
    if obj.kind == "power_mean":
        q = obj.q
        if q == 1:
            coef = obj.weights.copy()
        else:
            coef = obj.weights * q * dists ** (q - 1)
        g = coef @ vs
    elif obj.kind == "circumcenter":
        i = int(np.argmax(dists))
        g = 2.0 * dists[i] * vs[i]
    else:
        active = dists > obj.radii
        g = vs[active].sum(axis=0) if active.any() else np.zeros(complex.ambient_dim)
    return value, g

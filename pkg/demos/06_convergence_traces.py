# Ellipsoid vs projected subgradient vs cyclic proximal point on one cell.
#
# Each run records (geodesic evaluations, best value) pairs.  Pass a
# directory to save a log-scale plot (needs matplotlib).

import sys

import numpy as np

from cubeopt import Objective, complex_from_dict, cyclic_proximal_point, ellipsoid_minimize, evaluate, subgradient_minimize
from cubeopt.solvers import CellOracle

L = complex_from_dict({
    "ambient_dim": 2,
    "maximal_cubes": [
        {"base": [-1, 0], "axes": [0, 1]},
        {"base": [-1, -1], "axes": [0, 1]},
        {"base": [0, -1], "axes": [0, 1]},
    ],
})
obj = Objective.mean([[1, 0], [0, 1], [-1, 0]])
alpha = (2 - np.sqrt(2)) / 6
fstar = evaluate(L, obj, [-alpha, alpha])

runs = {
    "ellipsoid": ellipsoid_minimize(CellOracle(L, obj, 0), 2),
    "subgrad": subgradient_minimize(CellOracle(L, obj, 0), 2),
    "cpp": cyclic_proximal_point(L, obj, [-0.5, 0.5], max_iter=3000),
}
for name, res in runs.items():
    for gap in (1e-2, 1e-3, 1e-6):
        hit = next((g for g, v in res.trace if v - fstar <= gap), None)
        print(f"{name:9s} gap {gap:.0e}: {hit} geodesics")

if len(sys.argv) > 1:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for name, res in runs.items():
        g, v = np.array(res.trace).T
        plt.step(g, np.maximum(v - fstar, 1e-16), where="post", label=name)
    plt.yscale("log")
    plt.xlabel("geodesic evaluations")
    plt.ylabel("best value - optimum")
    plt.legend()
    plt.savefig(f"{sys.argv[1]}/traces.png", dpi=120)

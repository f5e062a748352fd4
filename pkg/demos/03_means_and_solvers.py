# Fréchet mean on the L-complex by cell decomposition.
#
# minimize() keeps an incumbent point, solves the convex subproblem on a
# maximal cube containing it, and moves whenever that strictly improves.

import numpy as np

from cubeopt import Objective, complex_from_dict, minimize, solve_cell

L = complex_from_dict({
    "ambient_dim": 2,
    "maximal_cubes": [
        {"base": [-1, 0], "axes": [0, 1]},
        {"base": [-1, -1], "axes": [0, 1]},
        {"base": [0, -1], "axes": [0, 1]},
    ],
})
anchors = [[1, 0], [0, 1], [-1, 0]]
obj = Objective.mean(anchors)

rep = minimize(L, obj, x0=[0, 0])
alpha = (2 - np.sqrt(2)) / 6
print("mean:", rep.minimizer, " expected:", [-alpha, alpha])
print("value:", rep.value, " cells visited:", rep.visited_cells, " geodesics:", rep.total_geodesics)

# %% the same objective with the projected subgradient cell solver
print(solve_cell(L, obj, 0, method="subgrad").minimizer)

# %% other objectives: geometric median and circumcenter
for o in (Objective("power_mean", anchors, 1.0), Objective.circumcenter(anchors)):
    r = minimize(L, o, x0=[0, 0], exhaustive=True)
    print(o.kind, o.q, r.minimizer.round(6), round(r.value, 6), "certified" if r.certified else "")

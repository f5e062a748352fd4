# Do geodesic balls intersect, and how far is a point from the intersection?

import numpy as np

from cubeopt import complex_from_dict, distance_to_intersection, solve_feasibility

L = complex_from_dict({
    "ambient_dim": 2,
    "maximal_cubes": [
        {"base": [-1, 0], "axes": [0, 1]},
        {"base": [-1, -1], "axes": [0, 1]},
        {"base": [0, -1], "axes": [0, 1]},
    ],
})
anchors = [[-1, 1], [1, -1]]

# the two far corners are 2*sqrt(2) apart, so radii below sqrt(2) miss
for r in (1.3, 1.5):
    res = solve_feasibility(L, anchors, [r, r])
    print(f"r = {r}: {res.status}, penalty {res.penalty_value:.3g}, witness {res.witness.round(4)}")

# %% bracket the distance from a corner to the lens between the two balls
res = distance_to_intersection(L, [-1, -1], anchors, [1.6, 1.6], tol_bisect=1e-3)
print(res.status, "distance in", [round(res.lo, 5), round(res.hi, 5)], "after", res.steps, "steps")

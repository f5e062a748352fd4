# Cubical complexes, validity checks and geodesics.
#
# An L-shaped complex: three unit squares around the origin, with the
# fourth quadrant missing.  Geodesics that go "round the corner" bend at 0.

import numpy as np

from cubeopt import check_link_condition, check_simply_connected, complex_from_dict, find_core, geodesic

L = complex_from_dict({
    "ambient_dim": 2,
    "maximal_cubes": [
        {"base": [-1, 0], "axes": [0, 1]},
        {"base": [-1, -1], "axes": [0, 1]},
        {"base": [0, -1], "axes": [0, 1]},
    ],
})

print("link condition:", check_link_condition(L).ok)
print("simply connected:", check_simply_connected(L))
print("core:", find_core(L))

# %% straight line inside one square
p = geodesic(L, [-0.9, 0.1], [-0.1, 0.9])
print(p.length, p.breakpoints.tolist())

# %% around the missing quadrant: the path bends at the origin
p = geodesic(L, [-1, 1], [1, -1])
print(p.length, "vs 2*sqrt(2) =", 2 * np.sqrt(2))
print("breakpoints:", p.breakpoints.round(9).tolist(), "cells:", p.cell_sequence)

# %% a generic pair that crosses two cells
p = geodesic(L, [-0.8, 0.7], [0.6, -0.3])
print(p.to_json())

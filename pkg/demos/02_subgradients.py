# Subgradients of distance functions restricted to one cube.
#
# For x in a cube P and an anchor a, g = cos(angle yxz) / |x - z| * (x - z),
# where y is the first breakpoint of the geodesic x -> a and z is the
# nearest point to a in the face F of P the geodesic leaves through.

import numpy as np

from cubeopt import complex_from_dict, distance, distance_subgradient

cx = complex_from_dict({
    "ambient_dim": 2,
    "maximal_cubes": [
        {"base": [0, 0], "axes": [0, 1]},
        {"base": [0, -1], "axes": [0, 1]},
        {"base": [-1, -1], "axes": [0, 1]},
        {"base": [-1, -2], "axes": [0, 1]},
    ],
})
P = cx.cubes[0]
x, a = np.array([0.5, 0.0]), np.array([-0.5, -2.0])
sg = distance_subgradient(cx, P, x, a)
print("g =", sg.vector, " d(a, x) =", sg.distance)

# %% the subgradient inequality on a few points of P
rng = np.random.default_rng(0)
for w in rng.random((5, 2)):
    lhs = sg.vector @ (w - x)
    rhs = distance(cx, a, w) - sg.distance
    print(f"w = {w.round(3)}  <g, w-x> = {lhs:+.4f}  <=  d(a,w) - d(a,x) = {rhs:+.4f}")

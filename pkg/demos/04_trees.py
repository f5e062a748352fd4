# Exact means on metric trees, and the same answer through the lattice.

from cubeopt import MetricTree, Objective, TreePoint, embed_tree, minimize, tree_mean

# a spider with three unit legs and one point halfway along each leg
spider = MetricTree.from_edges(["o", "a", "b", "c"], [("o", "a"), ("o", "b"), ("o", "c")])
pts = [TreePoint(("o", leg), "o", 0.5) for leg in "abc"]
m = tree_mean(spider, pts)
print("spider mean:", m, "at vertex", m.vertex())

# nudging the points does not move the mean off the centre
pts2 = [TreePoint(("o", leg), "o", d) for leg, d in zip("abc", (0.53, 0.48, 0.51))]
print("perturbed:", tree_mean(spider, pts2).vertex())

# %% a path a-b-c-d with points spread along it
path = MetricTree.from_edges("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
pts = [TreePoint(("a", "b"), "a", 0.2), TreePoint(("c", "d"), "c", 0.9), TreePoint(("b", "c"), "b", 0.4)]
m = tree_mean(path, pts)
print("path mean:", m)

emb = embed_tree(path)
rep = minimize(emb.complex, Objective.mean([emb.embed(p) for p in pts]), emb.embed(pts[0]))
print("through the lattice:", emb.locate(rep.minimizer))

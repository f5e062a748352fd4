"""Convex optimisation on CAT(0) cubical complexes embedded in Z^N."""

from .balls import ball_project, distance_to_intersection, solve_feasibility
from .complex import (
    Chart,
    Cube,
    CubicalComplex,
    cells_containing,
    chart_of,
    check_link_condition,
    check_simply_connected,
    complex_from_dict,
    cube_intersection,
    load_complex,
)
from .corebook import core_certifies_cat0, core_geodesic, find_core
from .decomposition import SolveReport, minimize
from .geodesics import GeodesicPath, distance, geodesic, point_along, rubber_band
from .objectives import Objective, cell_value_subgradient, evaluate
from .solvers import cyclic_proximal_point, ellipsoid_minimize, oracle, solve_cell, subgradient_minimize
from .subgradient import cosine_bound_check, distance_subgradient, initial_segment
from .trees import MetricTree, TreePoint, embed_tree, tree_distance, tree_mean

__all__ = [name for name in dir() if not name.startswith("_")]

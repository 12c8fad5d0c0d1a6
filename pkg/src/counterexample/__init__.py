"""
Analytic oracles and scenarios for the four-field counterexample system.

The set of constant data admitting a continuous solution is bounded by a
hyperbola; the oracles here decide it in closed form and the scan module
traces that boundary.
"""

from src.counterexample.oracles import ConstantData, AnalyticH1Spec, FeasibilityVerdict, B_matrix, b_inverse_norm, h0_nonempty, V, W, h1_origin_contains, feasibility_constant, feasibility_field, analytic_h1_polygon, intro_1d_feasible
from src.counterexample.scenarios import register_scenario, get_builder, scenario_names, build_paper_system, build_intro_system, build_custom_system
from src.counterexample.scan import BoundaryScan, boundary_scan

__all__ = [
    "ConstantData",
    "AnalyticH1Spec",
    "FeasibilityVerdict",
    "B_matrix",
    "b_inverse_norm",
    "h0_nonempty",
    "V",
    "W",
    "h1_origin_contains",
    "feasibility_constant",
    "feasibility_field",
    "analytic_h1_polygon",
    "intro_1d_feasible",
    "register_scenario",
    "get_builder",
    "scenario_names",
    "build_paper_system",
    "build_intro_system",
    "build_custom_system",
    "BoundaryScan",
    "boundary_scan",
]

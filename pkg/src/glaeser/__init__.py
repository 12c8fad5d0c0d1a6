"""
Discretized C^0-Glaeser refinement of convex fiber bundles.

Builds the bundle of pointwise solution sets of a linear inequality system
over a lattice, refines it until it stabilizes and extracts a continuous
selection when every fiber stays nonempty.
"""

from src.glaeser.convex2 import ConvexRegion, HalfPlane, Window, is_empty, contains, project, intersect, dilate, chebyshev_center, support, steiner_point, hausdorff_sampled
from src.glaeser.bundle import Grid, ConstraintRow, SpecialPoint, ScenarioSystem, Bundle, build_initial_bundle, fiber_at
from src.glaeser.refine import LinearEpsilon, RefinementConfig, RefinementReport, refine_once, refine_to_stable, brute_force_refine
from src.glaeser.selection import SelectionField, SelectionReport, construct_selection, verify_selection, modulus_of_continuity
from src.glaeser.errors import GlaeserError, EmptyRegion, DimMismatch, BadScenario, IndexOutOfRange, TooLarge, EmptyFiber, DomainError, NotStabilized

__all__ = [
    # Convex kernel
    "ConvexRegion",
    "HalfPlane",
    "Window",
    "is_empty",
    "contains",
    "project",
    "intersect",
    "dilate",
    "chebyshev_center",
    "support",
    "steiner_point",
    "hausdorff_sampled",
    # Bundles
    "Grid",
    "ConstraintRow",
    "SpecialPoint",
    "ScenarioSystem",
    "Bundle",
    "build_initial_bundle",
    "fiber_at",
    # Refinement
    "LinearEpsilon",
    "RefinementConfig",
    "RefinementReport",
    "refine_once",
    "refine_to_stable",
    "brute_force_refine",
    # Selection
    "SelectionField",
    "SelectionReport",
    "construct_selection",
    "verify_selection",
    "modulus_of_continuity",
    # Errors
    "GlaeserError",
    "EmptyRegion",
    "DimMismatch",
    "BadScenario",
    "IndexOutOfRange",
    "TooLarge",
    "EmptyFiber",
    "DomainError",
    "NotStabilized",
]

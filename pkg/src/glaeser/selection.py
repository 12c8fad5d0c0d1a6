"""
Continuous selection from a refined bundle.

A selection picks one point per node (the Steiner point of the fiber clipped
to the window) and interpolates multilinearly between nodes. Verification
re-evaluates the original inequality system on the nodes and on a finer grid.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator

from src.glaeser.bundle import Bundle, Grid, ScenarioSystem
from src.glaeser.convex2 import Window, polygon, steiner_point
from src.glaeser.errors import EmptyFiber
from src.glaeser.logging import log_selection_verified
from src.glaeser.refine import map_nodes, neighbor_offsets
from src.settings import ToleranceConfig


@dataclass(frozen=True, eq=False)
class SelectionField:
    """
    Node values of a selection and their multilinear interpolant.

    Attributes:
        grid: Lattice the values live on
        values: Array (node_count, M) of selected fiber points
        residuals: Per-node max violation of the node's fiber halfplanes
    """

    grid: Grid
    values: np.ndarray
    residuals: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.grid.node_count:
            raise ValueError(
                f"selection has {values.shape[0]} values for {self.grid.node_count} nodes"
            )
        residuals = np.array(self.residuals, dtype=float).ravel()
        if residuals.shape[0] != values.shape[0]:
            raise ValueError("one residual per node is required")
        values.flags.writeable = False
        residuals.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "residuals", residuals)

    @property
    def fiber_dim(self) -> int:
        return int(self.values.shape[1])

    @cached_property
    def interpolator(self) -> RegularGridInterpolator:
        axes = tuple(self.grid.axis(k) for k in range(self.grid.dim))
        grid_values = self.values.reshape(*self.grid.shape, self.fiber_dim)
        return RegularGridInterpolator(axes, grid_values, method="linear")

    def __call__(self, points) -> np.ndarray:
        """Interpolated values at points of shape (k, dim)."""
        points = np.asarray(points, dtype=float).reshape(-1, self.grid.dim)
        return self.interpolator(points)

    @cached_property
    def modulus_table(self) -> pd.DataFrame:
        return modulus_of_continuity(self)

    def to_frame(self) -> pd.DataFrame:
        """Columns x1..xd, F1..FM, residual in node order."""
        columns = {f"x{k + 1}": self.grid.nodes[:, k] for k in range(self.grid.dim)}
        columns.update({f"F{k + 1}": self.values[:, k] for k in range(self.fiber_dim)})
        columns["residual"] = self.residuals
        return pd.DataFrame(columns)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "SelectionField":
        """
        Rebuild a selection from an exported table.

        Raises:
            ValueError: If the coordinates do not form a full regular lattice
        """
        x_cols = sorted((c for c in frame.columns if c.startswith("x")), key=lambda c: int(c[1:]))
        f_cols = sorted((c for c in frame.columns if c.startswith("F")), key=lambda c: int(c[1:]))
        if not x_cols or not f_cols:
            raise ValueError("selection table needs x1.. and F1.. columns")
        axes = [np.unique(frame[c].to_numpy(dtype=float)) for c in x_cols]
        grid = Grid(
            tuple(a[0] for a in axes), tuple(a[-1] for a in axes), tuple(a.size for a in axes)
        )
        if grid.node_count != len(frame):
            raise ValueError("selection table is not a full lattice")
        ordered = frame.sort_values(x_cols, kind="stable")
        coords = ordered[x_cols].to_numpy(dtype=float)
        if not np.allclose(coords, grid.nodes, atol=1e-9 * (1 + np.abs(grid.nodes).max())):
            raise ValueError("selection table coordinates are not evenly spaced")
        residuals = (
            ordered["residual"].to_numpy(dtype=float)
            if "residual" in ordered
            else np.zeros(len(ordered))
        )
        return cls(grid, ordered[f_cols].to_numpy(dtype=float), residuals)


@dataclass
class SelectionReport:
    """Outcome of checking a selection against the original system."""

    passed: bool
    max_violation: float
    tol: float
    worst_location: Optional[tuple[float, ...]] = None
    node_violation: float = 0.0
    fine_violation: float = 0.0
    checked_points: int = 0
    violations: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_violation": float(self.max_violation),
            "tol": float(self.tol),
            "worst_location": list(self.worst_location) if self.worst_location else None,
            "node_violation": float(self.node_violation),
            "fine_violation": float(self.fine_violation),
            "checked_points": self.checked_points,
        }


def construct_selection(
    stable: Bundle,
    window: Window,
    n_dirs: int = ToleranceConfig.STEINER_DIRECTIONS,
    workers: int = 1,
) -> SelectionField:
    """
    Steiner-point selection of a bundle.

    The Steiner point of each fiber is its own member, so the selection
    solves the discretized system exactly at the nodes. It does not pin
    values the refinement leaves free: for zero data the refined origin
    fiber is a neighborhood of 0 of radius about kappa * h, and F(0) is
    only guaranteed to lie within 2 * kappa * h of 0.

    Args:
        stable: Refined bundle with nonempty fibers
        window: Fiber window used to make unbounded fibers compact
        n_dirs: Quadrature directions of the Steiner point
        workers: Thread count for per-node selection

    Returns:
        SelectionField with one value per node

    Raises:
        EmptyFiber: If a fiber (clipped to the window) is empty
    """
    nodes = stable.grid.nodes
    for i, fiber in enumerate(stable.fibers):
        if polygon(fiber, window).shape[0] == 0:
            raise EmptyFiber(f"fiber at node {i} is empty", tuple(float(c) for c in nodes[i]))

    def select(i: int) -> tuple[np.ndarray, float]:
        fiber = stable.fibers[i]
        point = steiner_point(fiber, window, n_dirs)
        if fiber.size == 0:
            return point, 0.0
        residual = float(np.max(fiber.normals @ point - fiber.offsets))
        return point, max(residual, 0.0)

    results = map_nodes(select, len(stable.fibers), workers)
    values = np.array([r[0] for r in results]).reshape(len(results), stable.fiber_dim)
    return SelectionField(stable.grid, values, np.array([r[1] for r in results]))


def _violations(system: ScenarioSystem, points: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.empty(points.shape[0])
    for k, (x, value) in enumerate(zip(points, values)):
        a, b, _ = system.constraint_matrix(x)
        out[k] = float(np.max(a @ value - b)) if b.size else 0.0
    return np.maximum(out, 0.0)


def verify_selection(
    sel: SelectionField,
    system: ScenarioSystem,
    tol: float = ToleranceConfig.SELECTION_TOL,
    refine_factor: int = 4,
) -> SelectionReport:
    """
    Check A(x) F(x) <= f(x) on the nodes and on a finer lattice.

    Args:
        sel: Selection to check
        system: Original inequality system
        tol: Allowed violation
        refine_factor: Subdivision of each grid cell for the fine check

    Returns:
        SelectionReport; passed iff the largest violation is within tol
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if refine_factor < 1:
        raise ValueError("refine_factor must be at least 1")
    grid = sel.grid
    node_violation = _violations(system, grid.nodes, sel.values)
    fine = Grid(grid.lower, grid.upper, tuple((r - 1) * refine_factor + 1 for r in grid.shape))
    fine_values = sel(fine.nodes)
    fine_violation = _violations(system, fine.nodes, fine_values)

    worst_node = int(np.argmax(node_violation))
    worst_fine = int(np.argmax(fine_violation))
    if fine_violation[worst_fine] > node_violation[worst_node]:
        worst, location = float(fine_violation[worst_fine]), fine.nodes[worst_fine]
    else:
        worst, location = float(node_violation[worst_node]), grid.nodes[worst_node]
    passed = worst <= tol
    report = SelectionReport(
        passed=passed,
        max_violation=worst,
        tol=tol,
        worst_location=tuple(float(c) for c in location),
        node_violation=float(node_violation.max()),
        fine_violation=float(fine_violation.max()),
        checked_points=int(grid.node_count + fine.node_count),
        violations=[float(v) for v in node_violation],
    )
    log_selection_verified(passed, worst, report.worst_location)
    return report


def _pair_slices(shape: Sequence[int], offset: Sequence[int]) -> tuple[tuple, tuple]:
    first, second = [], []
    for n, o in zip(shape, offset):
        first.append(slice(max(0, -o), n - max(0, o)))
        second.append(slice(max(0, o), n - max(0, -o)))
    return tuple(first), tuple(second)


def modulus_of_continuity(sel: SelectionField, levels: int = 4) -> pd.DataFrame:
    """
    Empirical modulus of continuity on the lattice.

    For d = h, 2h, 4h, ... (``levels`` entries) the largest |F(x) - F(y)| over
    node pairs with |x - y| <= d.

    Returns:
        DataFrame with columns ``distance`` and ``max_jump`` (nondecreasing)
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    grid = sel.grid
    values = sel.values.reshape(*grid.shape, sel.fiber_dim)
    distances = [grid.h * 2.0 ** k for k in range(levels)]
    offsets, reach = neighbor_offsets(grid, distances[-1])
    jump_by_offset = np.zeros(offsets.shape[0])
    for k, offset in enumerate(offsets):
        first, second = _pair_slices(grid.shape, offset)
        diff = values[first] - values[second]
        if diff.size:
            jump_by_offset[k] = float(np.linalg.norm(diff, axis=-1).max())
    jumps = []
    for d in distances:
        inside = reach <= d * (1 + 1e-12)
        jumps.append(float(jump_by_offset[inside].max()) if inside.any() else 0.0)
    return pd.DataFrame(
        {"distance": distances, "max_jump": np.maximum.accumulate(jumps)}
    )

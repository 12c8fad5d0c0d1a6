"""
Feasibility sweep over the (f2, f4) plane for fixed f1 and f3.

Classifies a lattice of constant data with the analytic decision, extracts
the feasible/infeasible boundary with a marching-squares edge trace and
measures how far that boundary is from a straight line.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from src.counterexample.oracles import ConstantData, feasibility_constant
from src.glaeser.logging import get_logger
from src.glaeser.refine import map_nodes
from src.settings import ScanDefaults

logger = get_logger("scan")


@dataclass(frozen=True, eq=False)
class BoundaryScan:
    """
    Result of a boundary scan.

    ``feasible[i, j]`` is the verdict at (f2_axis[i], f4_axis[j]).
    """

    f1: float
    f3: float
    f2_axis: np.ndarray
    f4_axis: np.ndarray
    feasible: np.ndarray
    boundary: np.ndarray
    fit: Optional[tuple[float, float, float]]
    chord_deviation_cells: float
    mismatches: int
    far_mismatches: int

    @property
    def cell(self) -> float:
        return float(max(np.diff(self.f2_axis).max(), np.diff(self.f4_axis).max()))

    def verdict_at(self, f2: float, f4: float) -> bool:
        i = int(np.argmin(np.abs(self.f2_axis - f2)))
        j = int(np.argmin(np.abs(self.f4_axis - f4)))
        return bool(self.feasible[i, j])

    def to_frame(self) -> pd.DataFrame:
        """One row per lattice point: f2, f4, feasible (0/1), f2 major."""
        f2, f4 = np.meshgrid(self.f2_axis, self.f4_axis, indexing="ij")
        return pd.DataFrame(
            {"f2": f2.ravel(), "f4": f4.ravel(), "feasible": self.feasible.ravel().astype(int)}
        )

    def boundary_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"f2": self.boundary[:, 0], "f4": self.boundary[:, 1]})

    def to_dict(self) -> dict:
        return {
            "f1": self.f1,
            "f3": self.f3,
            "resolution": int(self.f2_axis.size),
            "boundary_points": int(self.boundary.shape[0]),
            "fit": list(self.fit) if self.fit is not None else None,
            "chord_deviation_cells": self.chord_deviation_cells,
            "mismatches": self.mismatches,
            "far_mismatches": self.far_mismatches,
        }


def classify(f1: float, f3: float, f2_axis: np.ndarray, f4_axis: np.ndarray, workers: int = 1) -> np.ndarray:
    """Verdict grid of feasibility_constant over the (f2, f4) lattice."""

    def row(i: int) -> np.ndarray:
        return np.array(
            [feasibility_constant(ConstantData(f1, f2_axis[i], f3, f4)).feasible for f4 in f4_axis]
        )

    return np.array(map_nodes(row, f2_axis.size, workers), dtype=bool)


def trace_boundary(feasible: np.ndarray, f2_axis: np.ndarray, f4_axis: np.ndarray) -> np.ndarray:
    """
    Midpoints of lattice edges whose endpoints have different verdicts.

    Returns:
        Array (k, 2) of (f2, f4) points sorted by f2, then f4
    """
    points = []
    flips = feasible[1:, :] != feasible[:-1, :]
    i, j = np.nonzero(flips)
    points.append(np.column_stack([0.5 * (f2_axis[i] + f2_axis[i + 1]), f4_axis[j]]))
    flips = feasible[:, 1:] != feasible[:, :-1]
    i, j = np.nonzero(flips)
    points.append(np.column_stack([f2_axis[i], 0.5 * (f4_axis[j] + f4_axis[j + 1])]))
    boundary = np.vstack(points) if points else np.zeros((0, 2))
    order = np.lexsort((boundary[:, 1], boundary[:, 0]))
    return boundary[order]


def fit_hyperbola(boundary: np.ndarray, M: float) -> Optional[tuple[float, float, float]]:
    """
    Least-squares fit f4 = a + b / (f2 - M).

    Returns:
        (a, b, rms residual), or None with fewer than three usable points
    """
    usable = boundary[boundary[:, 0] > M + 1e-9]
    if usable.shape[0] < 3:
        return None
    design = np.column_stack([np.ones(usable.shape[0]), 1.0 / (usable[:, 0] - M)])
    coef, *_ = np.linalg.lstsq(design, usable[:, 1], rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - usable[:, 1]) ** 2)))
    return float(coef[0]), float(coef[1]), rms


def chord_deviation(boundary: np.ndarray, f2_range: tuple[float, float], cell: float) -> float:
    """
    Largest distance from a boundary point to the chord joining the extreme
    points with f2 in ``f2_range``, in grid cells (0 with fewer than 3 points).
    """
    inside = boundary[(boundary[:, 0] >= f2_range[0]) & (boundary[:, 0] <= f2_range[1])]
    if inside.shape[0] < 3:
        return 0.0
    start, end = inside[0], inside[-1]
    chord = end - start
    length = float(np.linalg.norm(chord))
    if length == 0.0:
        return 0.0
    rel = inside - start
    distance = np.abs(chord[0] * rel[:, 1] - chord[1] * rel[:, 0]) / length
    return float(distance.max() / cell)


def analytic_rule(f1: float, f3: float, f2: np.ndarray, f4: np.ndarray) -> np.ndarray:
    """
    Closed-form verdict f4 >= M + M^2 / (f2 - M) with M = -f3.

    Valid for f3 < 0 and f1 at least the scanned f2 and f4 values.
    """
    M = -f3
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(f2 > M, M + M * M / (f2 - M), np.inf)
    return (f2 > M) & (f4 >= bound) & (f1 + f3 >= 0)


def boundary_scan(
    f1: float = ScanDefaults.F1,
    f3: float = ScanDefaults.F3,
    f2_range: tuple[float, float] = ScanDefaults.RANGE,
    f4_range: Optional[tuple[float, float]] = None,
    resolution: int = ScanDefaults.RESOLUTION,
    chord_range: tuple[float, float] = (1.3, 2.8),
    workers: int = 1,
) -> BoundaryScan:
    """
    Sweep constant data over a (f2, f4) box.

    Args:
        f1: Fixed value of f1
        f3: Fixed value of f3
        f2_range: Closed f2 interval
        f4_range: Closed f4 interval (defaults to ``f2_range``)
        resolution: Lattice points per axis (>= 16)
        chord_range: f2 interval of the collinearity test
        workers: Thread count over lattice rows

    Returns:
        BoundaryScan with verdict grid, boundary, fit and diagnostics
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    f4_range = f2_range if f4_range is None else f4_range
    if f2_range[0] >= f2_range[1] or f4_range[0] >= f4_range[1]:
        raise ValueError("scan ranges must have positive extent")
    f2_axis = np.linspace(f2_range[0], f2_range[1], resolution)
    f4_axis = np.linspace(f4_range[0], f4_range[1], resolution)
    feasible = classify(f1, f3, f2_axis, f4_axis, workers)
    boundary = trace_boundary(feasible, f2_axis, f4_axis)
    cell = float(max(f2_axis[1] - f2_axis[0], f4_axis[1] - f4_axis[0]))

    fit = fit_hyperbola(boundary, -f3) if f3 < 0 else None
    mismatches = far_mismatches = 0
    if f3 < 0:
        f2, f4 = np.meshgrid(f2_axis, f4_axis, indexing="ij")
        rule = analytic_rule(f1, f3, f2, f4)
        wrong = rule != feasible
        mismatches = int(wrong.sum())
        if mismatches and boundary.shape[0]:
            points = np.column_stack([f2[wrong], f4[wrong]])
            gaps = np.min(
                np.linalg.norm(points[:, None, :] - boundary[None, :, :], axis=2), axis=1
            )
            far_mismatches = int(np.sum(gaps > cell * np.sqrt(2.0)))
        else:
            far_mismatches = mismatches

    scan = BoundaryScan(
        f1=float(f1),
        f3=float(f3),
        f2_axis=f2_axis,
        f4_axis=f4_axis,
        feasible=feasible,
        boundary=boundary,
        fit=fit,
        chord_deviation_cells=chord_deviation(boundary, chord_range, cell),
        mismatches=mismatches,
        far_mismatches=far_mismatches,
    )
    logger.info(
        f"BOUNDARY_SCAN | f1={f1:.6g} | f3={f3:.6g} | resolution={resolution} | "
        f"boundary={boundary.shape[0]} | mismatches={mismatches}"
    )
    return scan

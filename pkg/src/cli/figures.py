"""Figures written by the CLI."""

from typing import Optional

import numpy as np

from src.cli.svg import Circle, Figure, Group, Polygon, Polyline, Rect, sample_curve
from src.counterexample.oracles import (
    AnalyticH1Spec,
    ConstantData,
    analytic_h1_polygon,
    feasibility_constant,
)
from src.counterexample.scan import BoundaryScan
from src.glaeser.bundle import Bundle
from src.glaeser.convex2 import Window, polygon

REGION_COLORS = {"R1": "#1f77b4", "R2R4": "#2ca02c", "R3": "#d62728", "H1": "#9467bd", "engine": "#ff7f0e"}


def regions_figure(
    f: ConstantData, half_width: float, engine_vertices: Optional[np.ndarray] = None
) -> Figure:
    """
    The regions R1, R2 ∩ R4 and R3 at the origin for constant data, the
    analytic origin fiber and (optionally) the engine's origin fiber.
    """
    window = Window.square(half_width)
    fig = Figure(window.lower, window.upper)
    spec = AnalyticH1Spec.from_data(f)
    lo, hi = -half_width, half_width

    r1 = Polyline(
        [[lo, spec.r1_upper[1]], [spec.r1_upper[0], spec.r1_upper[1]], [spec.r1_upper[0], lo]],
        stroke=REGION_COLORS["R1"],
        id="R1",
    )
    (a1, a2), (b1, b2) = spec.r2_r4_lower, spec.r2_r4_upper
    r2r4 = Polygon([[a1, a2], [b1, a2], [b1, b2], [a1, b2]], stroke=REGION_COLORS["R2R4"], id="R2R4")
    if spec.M is None:
        c1, c2 = spec.r3_lower
        r3 = Polyline([[c1, hi], [c1, c2], [hi, c2]], stroke=REGION_COLORS["R3"], id="R3")
    else:
        M = spec.M
        r3 = Group(id="R3")
        if hi > M:
            start = M + M * M / (hi - M)
            r3.add(
                Polyline(
                    sample_curve(lambda y1: M + M * M / (y1 - M), start, hi),
                    stroke=REGION_COLORS["R3"],
                )
            )
    fig.add(fig.frame(), r1, r2r4, r3)

    inner = analytic_h1_polygon(f, window)
    if inner.shape[0] >= 3:
        fig.add(Polygon(inner, fill=REGION_COLORS["H1"], fill_opacity=0.35, stroke=REGION_COLORS["H1"], id="H1"))
    elif inner.shape[0] > 0:
        fig.add(Circle(inner[0, 0], inner[0, 1], 4 * fig.unit, fill=REGION_COLORS["H1"], id="H1"))
    if engine_vertices is not None and engine_vertices.shape[0]:
        fig.add(Polygon(engine_vertices, stroke=REGION_COLORS["engine"], stroke_dasharray="6 3", id="engine"))

    verdict = feasibility_constant(f)
    caption = "feasible" if verdict.feasible else "infeasible"
    fig.add(fig.label(lo + 10 * fig.unit, hi - 20 * fig.unit, caption, id="verdict"))
    return fig


def scan_figure(scan: BoundaryScan) -> Figure:
    """Verdict heatmap of a boundary scan with the analytic boundary curve."""
    f2, f4 = scan.f2_axis, scan.f4_axis
    d2, d4 = f2[1] - f2[0], f4[1] - f4[0]
    fig = Figure((f2[0] - d2 / 2, f4[0] - d4 / 2), (f2[-1] + d2 / 2, f4[-1] + d4 / 2))
    cells = Group(id="feasible", fill="#9ecae1")
    for i, j in zip(*np.nonzero(scan.feasible)):
        cells.add(Rect(f2[i] - d2 / 2, f4[j] - d4 / 2, d2, d4, fill=None))
    fig.add(cells, fig.frame())
    if scan.f3 < 0:
        M = -scan.f3
        start = max(f2[0], M + M * M / (f4[-1] - M)) if f4[-1] > M else f2[-1]
        if start < f2[-1]:
            fig.add(
                Polyline(
                    sample_curve(lambda x: M + M * M / (x - M), start, f2[-1]),
                    stroke="#d62728",
                    stroke_width=2,
                    id="analytic",
                )
            )
    return fig


def interval_bundle_figure(bundle: Bundle, window: Window) -> Figure:
    """Lower and upper fiber ends of a 1-D bundle, clipped to the window."""
    x = bundle.grid.axis(0)
    fig = Figure((x[0], window.lower[0]), (x[-1], window.upper[0]))
    lower, upper = [], []
    for xi, fiber in zip(x, bundle.fibers):
        ends = polygon(fiber, window)
        if ends.shape[0]:
            lower.append([xi, ends[0, 0]])
            upper.append([xi, ends[1, 0]])
    fig.add(fig.frame())
    if lower:
        fig.add(Polyline(lower, stroke="#1f77b4", id="lower"), Polyline(upper, stroke="#d62728", id="upper"))
    return fig


def fiber_figure(vertices: np.ndarray, window: Window) -> Figure:
    """One planar fiber clipped to the window."""
    fig = Figure(window.lower, window.upper)
    fig.add(fig.frame())
    if vertices.shape[0]:
        fig.add(Polygon(vertices, fill=REGION_COLORS["engine"], fill_opacity=0.35, id="fiber"))
    else:
        fig.add(fig.label(window.lower[0] + 10 * fig.unit, window.upper[1] - 20 * fig.unit, "empty"))
    return fig

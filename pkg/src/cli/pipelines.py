"""
Command pipelines.

Each pipeline returns an exit code and the report it produced; artifacts are
written through src.cli.artifacts.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from src.cli import artifacts
from src.cli.config import ScenarioConfig
from src.cli.figures import fiber_figure, interval_bundle_figure, regions_figure, scan_figure
from src.counterexample.oracles import (
    ConstantData,
    FeasibilityVerdict,
    feasibility_constant,
    feasibility_field,
    intro_1d_feasible,
)
from src.counterexample.scan import boundary_scan
from src.counterexample.scenarios import build_paper_system, PAPER_DOMAIN
from src.glaeser.bundle import Bundle, Grid, ScenarioSystem, build_initial_bundle
from src.glaeser.convex2 import Window, polygon
from src.glaeser.logging import get_logger
from src.glaeser.refine import RefinementConfig, RefinementReport, refine_to_stable
from src.glaeser.selection import SelectionField, construct_selection, verify_selection
from src.settings import AppConfig

logger = get_logger("cli")

EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_ERROR = 2


@dataclass
class RunOutcome:
    exit_code: int
    report: dict[str, Any] = field(default_factory=dict)
    written: list[str] = field(default_factory=list)


def refinement_config(cfg: ScenarioConfig, system: ScenarioSystem, grid: Grid) -> RefinementConfig:
    """RefinementConfig from the [refinement] table over scenario defaults."""
    overrides = dict(cfg.refinement)
    half_width = overrides.pop("window", None)
    if half_width is not None:
        overrides["window"] = Window.square(float(half_width), system.fiber_dim)
    return RefinementConfig.for_system(system, grid, **overrides)


def analytic_verdict(cfg: ScenarioConfig, system: ScenarioSystem, grid: Grid) -> Optional[FeasibilityVerdict]:
    """Closed-form decision for the scenario, when one exists."""
    if cfg.scenario == "paper-2d":
        if cfg.constant_data is not None:
            return feasibility_constant(cfg.constant_data)
        return feasibility_field(system.data, grid)
    if cfg.scenario == "intro-1d":
        f = np.polynomial.Polynomial([float(c) for c in cfg.data["polynomial"]])
        feasible = intro_1d_feasible(
            lambda x: float(f(x)),
            derivative=float(f.deriv()(0.0)),
            domain=(grid.lower[0], grid.upper[0]),
        )
        return FeasibilityVerdict(feasible, cause=None if feasible else "criterion f(0) = 0, f'(0) >= 0 or pointwise fiber test fails")
    return None


def _origin_node(grid: Grid, system: ScenarioSystem) -> int:
    for special in system.special_points:
        index = grid.index_of(special.location)
        if index is not None:
            return index
    return 0


def feasibility_frame(bundle: Bundle, window: Window) -> pd.DataFrame:
    """Per node: coordinates and whether the fiber is nonempty."""
    nodes = bundle.grid.nodes
    empty = bundle.empty_mask() if bundle.fiber_dim == 1 else bundle.empty_mask(window)
    columns = {f"x{k + 1}": nodes[:, k] for k in range(bundle.grid.dim)}
    columns["nonempty"] = (~empty).astype(int)
    return pd.DataFrame(columns)


def run_scenario(cfg: ScenarioConfig, output_dir: Optional[str] = None) -> RunOutcome:
    """
    Refine a scenario and write the requested artifacts.

    Exit codes: 0 feasible, 1 infeasible (empty fiber), 2 not stabilized.
    """
    system = cfg.build_system()
    grid = cfg.grid
    config = refinement_config(cfg, system, grid)
    outdir = Path(output_dir or cfg.outputs.directory)

    oracle = analytic_verdict(cfg, system, grid)
    bundle = build_initial_bundle(system, grid, workers=config.workers)
    refined, report = refine_to_stable(bundle, config)

    selection: Optional[SelectionField] = None
    selection_report = None
    if report.verdict == "feasible" and cfg.selection.enabled:
        selection = construct_selection(refined, config.window, cfg.selection.n_dirs, config.workers)
        tol = cfg.selection.tol
        if tol is None:
            tol = 2.0 * float(config.epsilon_of_r(grid.h))
        selection_report = verify_selection(selection, system, tol, cfg.selection.refine_factor)
        if not selection_report.passed:
            logger.warning(f"SELECTION_CHECK_FAILED | max_violation={selection_report.max_violation:.6g}")

    document = _run_document(cfg, grid, config, report, oracle, selection_report)
    outcome = RunOutcome(
        exit_code={"feasible": EXIT_FEASIBLE, "infeasible": EXIT_INFEASIBLE}.get(report.verdict, EXIT_ERROR),
        report=document,
    )

    wanted = set(cfg.outputs.artifacts)
    if "feasibility-grid" in wanted:
        path = artifacts.write_csv(feasibility_frame(refined, config.window), outdir / "feasibility_grid.csv", "feasibility-grid")
        outcome.written.append(str(path))
    if "selection-csv" in wanted and selection is not None:
        path = artifacts.write_csv(selection.to_frame(), outdir / "selection.csv", "selection-csv")
        outcome.written.append(str(path))
    if "region-svg" in wanted:
        path = artifacts.write_text(_region_svg(cfg, system, refined, config.window), outdir / "regions.svg", "region-svg")
        outcome.written.append(str(path))
    if "report" in wanted:
        document["artifacts"] = [Path(p).name for p in outcome.written]
        path = artifacts.write_json(document, outdir / "report.json", "report")
        outcome.written.append(str(path))
    return outcome


def _run_document(cfg, grid, config, report: RefinementReport, oracle, selection_report) -> dict:
    document = {
        "schema_version": AppConfig.SCHEMA_VERSION,
        "scenario": cfg.scenario,
        "grid": {"lower": list(grid.lower), "upper": list(grid.upper), "resolution": list(grid.resolution)},
        "window": {"lower": list(config.window.lower), "upper": list(config.window.upper)},
        "epsilon_at_h": float(config.epsilon_of_r(grid.h)),
        "verdict": report.verdict,
        "refinement": report.to_dict(),
        "oracle": oracle.to_dict() if oracle is not None else None,
        "oracle_agrees": None,
        "selection": selection_report.to_dict() if selection_report is not None else None,
    }
    if oracle is not None and report.verdict != "undetermined":
        document["oracle_agrees"] = oracle.feasible == (report.verdict == "feasible")
    return document


def _region_svg(cfg: ScenarioConfig, system: ScenarioSystem, refined: Bundle, window: Window) -> str:
    if refined.fiber_dim == 1:
        return interval_bundle_figure(refined, window).svg()
    origin = _origin_node(refined.grid, system)
    vertices = polygon(refined.fibers[origin], window)
    if cfg.scenario == "paper-2d" and cfg.constant_data is not None:
        f = ConstantData.from_sequence(cfg.constant_data)
        half_width = max(5.0, 1.5 * float(np.max(np.abs(f.as_array()))))
        return regions_figure(f, half_width, vertices).svg()
    return fiber_figure(vertices, window).svg()


def scan_pipeline(
    f1: float,
    f3: float,
    f2_range: tuple[float, float],
    resolution: int,
    out_csv: Optional[str] = None,
    out_svg: Optional[str] = None,
    workers: int = 1,
) -> RunOutcome:
    """Boundary scan with optional CSV and SVG artifacts."""
    scan = boundary_scan(f1=f1, f3=f3, f2_range=f2_range, resolution=resolution, workers=workers)
    outcome = RunOutcome(EXIT_FEASIBLE, scan.to_dict())
    if out_csv:
        outcome.written.append(str(artifacts.write_csv(scan.to_frame(), out_csv, "feasibility-grid")))
    if out_svg:
        outcome.written.append(str(artifacts.write_text(scan_figure(scan).svg(), out_svg, "scan-svg")))
    return outcome


def plot_regions_pipeline(
    f: ConstantData, half_width: float, out_svg: str, resolution: int = 17, radius: float = 1.5
) -> RunOutcome:
    """
    Regions at the origin with the engine's refined origin fiber on top.

    The engine runs the paper-2d scenario on a ``resolution``^2 grid over the
    unit square with a fixed neighbor radius.
    """
    verdict = feasibility_constant(f)
    system = build_paper_system(f)
    grid = Grid(PAPER_DOMAIN[0], PAPER_DOMAIN[1], (resolution, resolution))
    config = RefinementConfig.for_system(system, grid, neighbor_radius=radius)
    refined, report = refine_to_stable(build_initial_bundle(system, grid), config)
    origin = grid.index_of((0.0, 0.0))
    vertices = polygon(refined.fibers[origin], config.window)
    path = artifacts.write_text(regions_figure(f, half_width, vertices).svg(), out_svg, "region-svg")
    return RunOutcome(
        EXIT_FEASIBLE,
        {"oracle": verdict.to_dict(), "refinement": report.to_dict()},
        [str(path)],
    )


def verify_selection_pipeline(cfg: ScenarioConfig, selection_csv: str, tol: Optional[float] = None) -> RunOutcome:
    """Re-check an exported selection against a scenario: 0 pass, 1 fail."""
    system = cfg.build_system()
    selection = SelectionField.from_frame(artifacts.read_csv(selection_csv))
    if tol is None:
        tol = cfg.selection.tol
    if tol is None:
        config = refinement_config(cfg, system, selection.grid)
        tol = 2.0 * float(config.epsilon_of_r(selection.grid.h))
    report = verify_selection(selection, system, tol, cfg.selection.refine_factor)
    return RunOutcome(EXIT_FEASIBLE if report.passed else EXIT_INFEASIBLE, report.to_dict())

"""
Discretized C^0-Glaeser refinement.

One pass replaces every fiber by

    K~(x) = K(x) ∩ ⋂_{0 < |y - x| <= r} dilate(K(y), eps(|y - x|))

over the lattice neighbors y inside the current radius r. An empty neighbor
empties the node. Passes are repeated until no fiber moves by more than the
stabilization tolerance, either at a fixed radius (by default the whole
grid) or on a ring schedule that shrinks the radius each pass.

Work happens inside a fiber window: halfplanes that are inactive on the
clipped polygon are not carried over, and fiber changes are measured on the
clipped polygons.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from src.glaeser.bundle import Bundle, Grid, ScenarioSystem, data_lipschitz, default_window
from src.glaeser.convex2 import (
    ConvexRegion,
    Window,
    clip_polygon,
    contains,
    polygon,
    polygon_distances,
)
from src.glaeser.errors import NotStabilized, TooLarge
from src.glaeser.logging import log_empty_fiber, log_refine_done, log_refine_pass
from src.settings import RefinementDefaults, ToleranceConfig


@dataclass(frozen=True)
class LinearEpsilon:
    """eps(r) = kappa * r."""

    kappa: float

    def __call__(self, r):
        return self.kappa * np.asarray(r, dtype=float)


@dataclass(frozen=True)
class RefinementConfig:
    """
    Parameters of the discretized refinement.

    ``neighbor_radius`` fixes the radius of every pass; when it is None the
    ring schedule starts at ``ring_start * h`` and halves each pass, floored
    at ``ring_floor * h``.
    """

    window: Window
    epsilon_of_r: Callable = LinearEpsilon(1.0)
    neighbor_radius: Optional[float] = None
    ring_start: float = RefinementDefaults.RING_START
    ring_floor: float = RefinementDefaults.RING_FLOOR
    max_iterations: int = RefinementDefaults.MAX_ITERATIONS
    stabilization_tol: float = RefinementDefaults.STABILIZATION_TOL
    workers: int = RefinementDefaults.WORKERS

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.stabilization_tol < 0:
            raise ValueError("stabilization_tol must be nonnegative")
        if self.neighbor_radius is not None and self.neighbor_radius <= 0:
            raise ValueError("neighbor_radius must be positive")
        if not 0 < self.ring_floor <= self.ring_start:
            raise ValueError("ring schedule needs 0 < ring_floor <= ring_start")
        ladder = np.array([0.0, 1e-6, 1e-3, 1e-2, 0.1, 1.0, 10.0])
        values = np.asarray(self.epsilon_of_r(ladder), dtype=float)
        if abs(values[0]) > 1e-12:
            raise ValueError("epsilon_of_r must vanish at r = 0")
        if np.any(np.diff(values) < 0):
            raise ValueError("epsilon_of_r must be nondecreasing")

    @classmethod
    def for_system(cls, system: ScenarioSystem, grid: Grid, **overrides) -> "RefinementConfig":
        """
        Default configuration for a scenario on a grid.

        kappa = 4 * (Lipschitz bound of the data) + 1, window [-L, L]^M with
        L = WINDOW_SCALE * (1 + max |f_i|).

        Unless ``neighbor_radius`` or a ring parameter is given, every pass
        compares each node with all other nodes (radius = grid span). For
        interval fibers the first pass reaches the fixed point and the second
        confirms it.
        Passing ``ring_start`` or ``ring_floor`` selects the shrinking ring
        schedule instead.
        """
        ring = "ring_start" in overrides or "ring_floor" in overrides
        if "neighbor_radius" not in overrides and not ring:
            overrides["neighbor_radius"] = grid.span
        if "epsilon_of_r" not in overrides:
            kappa = overrides.pop("kappa", None)
            if kappa is None:
                kappa = 4.0 * data_lipschitz(system, grid) + 1.0
            overrides["epsilon_of_r"] = LinearEpsilon(float(kappa))
        overrides.pop("kappa", None)
        overrides.setdefault("window", default_window(system, grid))
        return cls(**overrides)

    def radius(self, iteration: int, h: float) -> float:
        """Neighbor radius of the pass with 0-based index ``iteration``."""
        if self.neighbor_radius is not None:
            return float(self.neighbor_radius)
        return max(self.ring_start * h / 2.0 ** iteration, self.ring_floor * h)


@dataclass
class RefinementReport:
    """Outcome of an iterated refinement."""

    iterations_run: int = 0
    stabilized: bool = False
    empty_nodes: list[int] = field(default_factory=list)
    per_iteration_change: list[float] = field(default_factory=list)
    radii: list[float] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.empty_nodes:
            return "infeasible"
        return "feasible" if self.stabilized else "undetermined"

    def raise_if_unstable(self) -> None:
        """
        Raises:
            NotStabilized: If the run ended without stabilizing or finding an
                empty fiber
        """
        if self.verdict == "undetermined":
            raise NotStabilized(
                f"refinement did not stabilize in {self.iterations_run} iterations"
            )

    def to_dict(self) -> dict:
        return {
            "iterations_run": self.iterations_run,
            "stabilized": self.stabilized,
            "verdict": self.verdict,
            "empty_nodes": list(self.empty_nodes),
            "per_iteration_change": [float(c) for c in self.per_iteration_change],
            "radii": [float(r) for r in self.radii],
        }


def neighbor_offsets(grid: Grid, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Lattice offsets within a radius.

    Returns:
        Tuple (offsets, distances): integer offsets (m, dim) with
        0 < |offset * h| <= radius, sorted by distance then lexicographically
    """
    spacing = np.array(grid.spacing)
    spans = [min(int(np.floor(radius / h + 1e-9)), r - 1) for h, r in zip(spacing, grid.shape)]
    axes = [np.arange(-s, s + 1) for s in spans]
    mesh = np.meshgrid(*axes, indexing="ij")
    offsets = np.column_stack([m.ravel() for m in mesh])
    distances = np.linalg.norm(offsets * spacing, axis=1)
    keep = (distances > 0) & (distances <= radius * (1 + 1e-12))
    offsets, distances = offsets[keep], distances[keep]
    order = np.lexsort(tuple(offsets[:, k] for k in reversed(range(grid.dim))) + (distances,))
    return offsets[order], distances[order]


def node_neighbors(
    grid: Grid, offsets: np.ndarray, distances: np.ndarray, index: int
) -> tuple[np.ndarray, np.ndarray]:
    """Flat indices and distances of the neighbors of one node that stay on the grid."""
    multi = np.array(np.unravel_index(index, grid.shape))
    target = multi + offsets
    valid = np.all((target >= 0) & (target < np.array(grid.shape)), axis=1)
    flat = np.ravel_multi_index(tuple(target[valid].T), grid.shape)
    return flat, distances[valid]


def map_nodes(func: Callable[[int], tuple], count: int, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(func, range(count)))
    return [func(i) for i in range(count)]


def _padded(fibers: Sequence[ConvexRegion], dim: int) -> tuple[np.ndarray, np.ndarray]:
    width = max((f.size for f in fibers), default=0)
    normals = np.zeros((len(fibers), width, dim))
    offsets = np.full((len(fibers), width), np.inf)
    for i, fiber in enumerate(fibers):
        normals[i, : fiber.size] = fiber.normals
        offsets[i, : fiber.size] = fiber.offsets
    return normals, offsets


def _pass_planar(
    bundle: Bundle, config: RefinementConfig, offsets: np.ndarray, distances: np.ndarray
) -> tuple[list[ConvexRegion], np.ndarray]:
    window = config.window
    grid = bundle.grid
    tol = ToleranceConfig.LP_FEASIBILITY_TOL
    fibers = bundle.fibers
    vertices = [polygon(f, window, tol) for f in fibers]
    empty = np.array([v.shape[0] == 0 for v in vertices], dtype=bool)
    normals, bounds = _padded(fibers, 2)
    scale = 1.0 + max(abs(b) for b in window.lower + window.upper)
    active_tol = ToleranceConfig.MEMBERSHIP_TOL * scale
    emptied = ConvexRegion.empty(2)

    def refine_node(i: int) -> tuple[ConvexRegion, float]:
        fiber = fibers[i]
        if empty[i]:
            return fiber, 0.0
        neighbors, reach = node_neighbors(grid, offsets, distances, i)
        if neighbors.size == 0:
            return fiber, 0.0
        if empty[neighbors].any():
            return emptied, window.diameter
        widen = np.asarray(config.epsilon_of_r(reach), dtype=float)
        cand_normals = normals[neighbors].reshape(-1, 2)
        cand_offsets = (bounds[neighbors] + widen[:, None]).reshape(-1)
        slack = vertices[i] @ cand_normals.T - cand_offsets
        violated = np.any(slack > tol, axis=0)
        if not violated.any():
            return fiber, 0.0
        cut_normals, cut_offsets = cand_normals[violated], cand_offsets[violated]
        # deepest cut first
        order = np.argsort(-slack[:, violated].max(axis=0), kind="stable")
        cut_normals, cut_offsets = cut_normals[order], cut_offsets[order]
        clipped = clip_polygon(vertices[i], cut_normals, cut_offsets, tol)
        if clipped.shape[0] == 0:
            return emptied, window.diameter
        active = np.any(clipped @ cut_normals.T - cut_offsets >= -active_tol, axis=0)
        refined = ConvexRegion(
            np.vstack([fiber.normals, cut_normals[active]]),
            np.concatenate([fiber.offsets, cut_offsets[active]]),
            2,
        )
        change = float(polygon_distances(clipped, vertices[i]).max())
        return refined, change

    results = map_nodes(refine_node, len(fibers), config.workers)
    return [r[0] for r in results], np.array([r[1] for r in results])


def _pass_interval(
    bundle: Bundle, config: RefinementConfig, offsets: np.ndarray, distances: np.ndarray
) -> tuple[list[ConvexRegion], np.ndarray]:
    window = config.window
    tol = ToleranceConfig.LP_FEASIBILITY_TOL
    bounds = np.array([f.bounds for f in bundle.fibers])
    lo, hi = bounds[:, 0], bounds[:, 1]
    empty = lo > hi + tol
    new_lo, new_hi = lo.copy(), hi.copy()
    blocked = empty.copy()
    eps = np.asarray(config.epsilon_of_r(distances), dtype=float)
    index = np.arange(len(bundle.fibers))
    for offset, widen in zip(offsets[:, 0], eps):
        target = index + offset
        valid = (target >= 0) & (target < index.size)
        source = target[valid]
        new_lo[valid] = np.maximum(new_lo[valid], lo[source] - widen)
        new_hi[valid] = np.minimum(new_hi[valid], hi[source] + widen)
        blocked[valid] |= empty[source]
    now_empty = blocked | (new_lo > new_hi + tol)
    wlo, whi = window.lower[0], window.upper[0]
    shift = np.maximum(
        np.abs(np.clip(new_lo, wlo, whi) - np.clip(lo, wlo, whi)),
        np.abs(np.clip(new_hi, wlo, whi) - np.clip(hi, wlo, whi)),
    )
    changes = np.where(now_empty & ~empty, window.diameter, np.where(empty, 0.0, shift))
    emptied = ConvexRegion.empty(1)
    fibers = []
    for i, fiber in enumerate(bundle.fibers):
        if empty[i]:
            fibers.append(fiber)
        elif now_empty[i]:
            fibers.append(emptied)
        elif new_lo[i] == lo[i] and new_hi[i] == hi[i]:
            fibers.append(fiber)
        else:
            fibers.append(ConvexRegion.interval(new_lo[i], new_hi[i]))
    return fibers, changes


def _refine_pass(
    bundle: Bundle, config: RefinementConfig, radius: float
) -> tuple[Bundle, np.ndarray, int]:
    offsets, distances = neighbor_offsets(bundle.grid, radius)
    if bundle.fiber_dim == 1:
        fibers, changes = _pass_interval(bundle, config, offsets, distances)
    else:
        fibers, changes = _pass_planar(bundle, config, offsets, distances)
    return bundle.with_fibers(fibers), changes, int(offsets.shape[0])


def empty_mask(bundle: Bundle, window: Window) -> np.ndarray:
    """Emptiness per node: exact for intervals, within the window in the plane."""
    if bundle.fiber_dim == 1:
        return bundle.empty_mask()
    return bundle.empty_mask(window)


def refine_once(
    bundle: Bundle, config: RefinementConfig, radius: Optional[float] = None
) -> Bundle:
    """
    One discretized refinement pass.

    Args:
        bundle: Input bundle (left unchanged)
        config: Refinement parameters
        radius: Neighbor radius; defaults to the first radius of the schedule

    Returns:
        Fresh bundle of refined fibers
    """
    if radius is None:
        radius = config.radius(0, bundle.grid.h)
    refined, _, _ = _refine_pass(bundle, config, radius)
    return refined


def refine_to_stable(
    bundle: Bundle, config: RefinementConfig
) -> tuple[Bundle, RefinementReport]:
    """
    Iterate refinement until fibers stop moving.

    Stops when the largest fiber change of a pass is within
    ``stabilization_tol``, when any fiber becomes empty (emptiness is
    permanent), or after ``max_iterations`` passes.

    Returns:
        Tuple (bundle, report)
    """
    report = RefinementReport()
    mask = empty_mask(bundle, config.window)
    if mask.any():
        report.empty_nodes = [int(i) for i in np.flatnonzero(mask)]
        first = report.empty_nodes[0]
        log_empty_fiber(first, bundle.grid.nodes[first])
        log_refine_done(0, False, len(report.empty_nodes))
        return bundle, report

    current = bundle
    h = bundle.grid.h
    for iteration in range(config.max_iterations):
        radius = config.radius(iteration, h)
        current, changes, neighbors = _refine_pass(current, config, radius)
        change = float(changes.max()) if changes.size else 0.0
        mask = empty_mask(current, config.window)
        report.iterations_run = iteration + 1
        report.per_iteration_change.append(change)
        report.radii.append(radius)
        log_refine_pass(iteration + 1, radius, neighbors, change, int(mask.sum()))
        if mask.any():
            report.empty_nodes = [int(i) for i in np.flatnonzero(mask)]
            first = report.empty_nodes[0]
            log_empty_fiber(first, current.grid.nodes[first])
            break
        if change <= config.stabilization_tol:
            report.stabilized = True
            break

    log_refine_done(report.iterations_run, report.stabilized, len(report.empty_nodes))
    return current, report


def _fiber_samples(fiber: ConvexRegion, window: Window, per_axis: int) -> np.ndarray:
    vertices = polygon(fiber, window)
    if vertices.shape[0] == 0:
        return vertices
    lower, upper = vertices.min(axis=0), vertices.max(axis=0)
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(lower, upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    lattice = np.column_stack([m.ravel() for m in mesh])
    tol = ToleranceConfig.MEMBERSHIP_TOL
    inside = np.array([contains(fiber, p, tol) for p in lattice], dtype=bool)
    return np.vstack([vertices, lattice[inside]])


def brute_force_refine(
    bundle: Bundle,
    eps_list: Sequence[float],
    delta_list: Sequence[float],
    window: Window,
    samples_per_axis: int = 41,
) -> Bundle:
    """
    Test oracle: direct sweep of the eps-delta condition on sampled fiber points.

    A sample z of K(x) survives iff for every ladder pair (eps_k, delta_k) and
    every node y with 0 < |y - x| <= delta_k, dist(z, K(y)) <= eps_k. Each
    fiber is replaced by the hull of its survivors.

    Raises:
        TooLarge: For grids with more than 33^2 nodes
    """
    grid = bundle.grid
    if grid.node_count > 33 ** 2:
        raise TooLarge(f"brute_force_refine is limited to 33^2 nodes, got {grid.node_count}")
    if len(eps_list) != len(delta_list) or not eps_list:
        raise ValueError("eps_list and delta_list must be nonempty ladders of equal length")
    ladder = sorted(zip(delta_list, eps_list))
    offsets, distances = neighbor_offsets(grid, ladder[-1][0])
    polygons = [polygon(f, window) for f in bundle.fibers]
    slack = ToleranceConfig.MEMBERSHIP_TOL
    emptied = ConvexRegion.empty(bundle.fiber_dim)

    fibers = []
    for i, fiber in enumerate(bundle.fibers):
        points = _fiber_samples(fiber, window, samples_per_axis)
        if points.shape[0] == 0:
            fibers.append(emptied)
            continue
        keep = np.ones(points.shape[0], dtype=bool)
        neighbors, reach = node_neighbors(grid, offsets, distances, i)
        for target, gap in zip(neighbors, reach):
            if polygons[target].shape[0] == 0:
                keep[:] = False
                break
            # tightest eps among pairs whose delta reaches this neighbor
            allowed = min(e for d, e in ladder if gap <= d * (1 + 1e-12))
            keep &= polygon_distances(polygons[target], points) <= allowed + slack
        survivors = points[keep]
        fibers.append(ConvexRegion.from_vertices(survivors) if survivors.shape[0] else emptied)
    return bundle.with_fibers(fibers)

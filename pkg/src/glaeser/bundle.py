"""
Fiber bundle construction module.

Discretizes the domain E, evaluates the coefficient and data fields of a
scenario system at every lattice node and builds the initial bundle
H_0(x) = {y : A(x) y <= f(x)}.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from src.glaeser.convex2 import ConvexRegion, Window, is_empty, polygon
from src.glaeser.errors import BadScenario, IndexOutOfRange
from src.glaeser.logging import get_logger
from src.settings import RefinementDefaults, ToleranceConfig

logger = get_logger("bundle")


@dataclass(frozen=True)
class Grid:
    """Regular lattice over an axis-aligned box, boundary nodes included."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    resolution: tuple[int, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        resolution = np.atleast_1d(self.resolution).astype(int)
        if resolution.size == 1 and len(lower) > 1:
            resolution = np.repeat(resolution, len(lower))
        resolution = tuple(int(r) for r in resolution)
        if not (len(lower) == len(upper) == len(resolution)) or len(lower) not in (1, 2):
            raise ValueError("Grid bounds and resolution must all be 1-D or 2-D")
        if any(r < 2 for r in resolution):
            raise ValueError("Grid resolution must be at least 2 nodes per axis")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError("Grid domain must have positive extent on every axis")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def square(cls, lower: float, upper: float, resolution: int, dim: int = 2) -> "Grid":
        return cls((lower,) * dim, (upper,) * dim, (resolution,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.resolution

    @property
    def node_count(self) -> int:
        return int(np.prod(self.resolution))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (r - 1) for lo, hi, r in zip(self.lower, self.upper, self.resolution))

    @property
    def h(self) -> float:
        """Smallest lattice spacing."""
        return min(self.spacing)

    @property
    def span(self) -> float:
        """Diameter of the domain box; every pair of nodes is within it."""
        return float(np.linalg.norm(np.subtract(self.upper, self.lower)))

    def axis(self, k: int) -> np.ndarray:
        """Node coordinates lower + i*h along axis k."""
        return self.lower[k] + np.arange(self.resolution[k]) * self.spacing[k]

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates (node_count, dim), last axis varying fastest."""
        mesh = np.meshgrid(*[self.axis(k) for k in range(self.dim)], indexing="ij")
        nodes = np.column_stack([m.ravel() for m in mesh])
        nodes.flags.writeable = False
        return nodes

    def node(self, index: int) -> np.ndarray:
        if not 0 <= index < self.node_count:
            raise IndexOutOfRange(f"node {index} outside grid of {self.node_count} nodes", index)
        return self.nodes[index]

    def unravel(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.shape))

    def ravel(self, multi: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.shape))

    def covers(self, point: Sequence[float]) -> bool:
        """True if the point lies in the closed grid box."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        return bool(np.all(point >= self.lower) and np.all(point <= self.upper))

    def index_of(self, point: Sequence[float], tol: float = 1e-12) -> Optional[int]:
        """Flat index of the lattice node at ``point``, or None if none sits there."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if not self.covers(point):
            return None
        multi = np.rint((point - np.array(self.lower)) / np.array(self.spacing)).astype(int)
        index = self.ravel(multi)
        if np.all(np.abs(self.nodes[index] - point) <= tol):
            return index
        return None

    def window(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        return self.lower, self.upper


@dataclass(frozen=True)
class ConstraintRow:
    """One row of A(x) paired with the index of its bound in f(x)."""

    coefficients: tuple[float, ...]
    bound_index: int


@dataclass(frozen=True)
class SpecialPoint:
    """Node whose constraint rows replace the generic rows."""

    location: tuple[float, ...]
    rows: tuple[ConstraintRow, ...]


DataField = Callable[[np.ndarray], np.ndarray]
RowField = Callable[[np.ndarray], Sequence[ConstraintRow]]


@dataclass(frozen=True)
class ScenarioSystem:
    """
    Pointwise linear inequality system A(x) F(x) <= f(x).

    Zero-coefficient rows are data conditions (0 <= f_i) and are only allowed
    in special-point overrides.
    """

    name: str
    fiber_dim: int
    n_constraints: int
    coeff_rows: RowField
    data: DataField
    special_points: tuple[SpecialPoint, ...] = ()
    domain: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None
    data_lipschitz: Optional[float] = None

    def special_at(self, x: np.ndarray, tol: float = 1e-12) -> Optional[SpecialPoint]:
        for special in self.special_points:
            if np.all(np.abs(np.asarray(special.location, dtype=float) - x) <= tol):
                return special
        return None

    def constraint_matrix(self, x: Sequence[float]) -> tuple[np.ndarray, np.ndarray, bool]:
        """
        Evaluate the system at one point.

        Args:
            x: Point of the domain

        Returns:
            Tuple (A, b, special) with rows A (k, M), bounds b (k,) and whether
            a special-point override was used
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        special = self.special_at(x)
        rows = special.rows if special is not None else tuple(self.coeff_rows(x))
        values = np.asarray(self.data(x), dtype=float).ravel()
        if values.size != self.n_constraints:
            raise BadScenario(
                f"data field returned {values.size} values, expected {self.n_constraints}",
                tuple(x),
            )
        a = np.array([row.coefficients for row in rows], dtype=float).reshape(-1, self.fiber_dim)
        b = np.array([values[row.bound_index] for row in rows], dtype=float)
        return a, b, special is not None

    def fiber(self, x: Sequence[float]) -> ConvexRegion:
        """The initial fiber H_0(x)."""
        a, b, special = self.constraint_matrix(x)
        norms = np.linalg.norm(a, axis=1)
        degenerate = norms == 0.0
        if np.any(degenerate):
            if not special:
                raise BadScenario(
                    f"scenario '{self.name}' produced a zero constraint row away from special points",
                    tuple(np.atleast_1d(x)),
                )
            if np.any(b[degenerate] < -ToleranceConfig.MEMBERSHIP_TOL):
                return ConvexRegion.empty(self.fiber_dim)
        return ConvexRegion(a[~degenerate], b[~degenerate], self.fiber_dim)


def constant_field(values: Sequence[float]) -> DataField:
    """Data field returning the same vector everywhere."""
    frozen = np.asarray(values, dtype=float).ravel().copy()
    frozen.flags.writeable = False
    return lambda x: frozen


def affine_field(values: Sequence[float], gradient: Sequence[Sequence[float]]) -> DataField:
    """Data field f(x) = values + gradient @ x."""
    base = np.asarray(values, dtype=float).ravel()
    slope = np.asarray(gradient, dtype=float).reshape(base.size, -1)
    return lambda x: base + slope @ np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class Bundle:
    """One convex fiber per grid node, stored in flat node order."""

    grid: Grid
    fibers: tuple[ConvexRegion, ...]
    fiber_dim: int

    def __post_init__(self):
        fibers = tuple(self.fibers)
        if len(fibers) != self.grid.node_count:
            raise ValueError(
                f"bundle has {len(fibers)} fibers for {self.grid.node_count} nodes"
            )
        if any(f.fiber_dim != self.fiber_dim for f in fibers):
            raise ValueError("every fiber must share the bundle fiber dimension")
        object.__setattr__(self, "fibers", fibers)

    @classmethod
    def constant(cls, grid: Grid, region: ConvexRegion) -> "Bundle":
        return cls(grid, (region,) * grid.node_count, region.fiber_dim)

    def with_fibers(self, fibers: Sequence[ConvexRegion]) -> "Bundle":
        return Bundle(self.grid, tuple(fibers), self.fiber_dim)

    def empty_mask(self, window: Optional[Window] = None) -> np.ndarray:
        """
        Emptiness of every fiber.

        Args:
            window: If given, decide emptiness of fiber ∩ window by clipping
                (fast); otherwise decide exact emptiness by LP.
        """
        if window is None:
            return np.array([is_empty(f) for f in self.fibers], dtype=bool)
        return np.array([polygon(f, window).shape[0] == 0 for f in self.fibers], dtype=bool)

    def empty_nodes(self, window: Optional[Window] = None) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.empty_mask(window))]


def fiber_at(bundle: Bundle, node: int) -> ConvexRegion:
    """
    Stored fiber of a node.

    Raises:
        IndexOutOfRange: If the node index is invalid
    """
    if not 0 <= node < len(bundle.fibers):
        raise IndexOutOfRange(f"node {node} outside bundle of {len(bundle.fibers)} fibers", node)
    return bundle.fibers[node]


def _check_grid(system: ScenarioSystem, grid: Grid) -> None:
    domain = None
    if system.domain is not None:
        lower, upper = (np.atleast_1d(np.asarray(b, dtype=float)) for b in system.domain)
        if lower.size != grid.dim:
            raise BadScenario(f"grid dimension {grid.dim} does not match scenario '{system.name}'")
        if np.any(np.array(grid.lower) < lower - 1e-12) or np.any(np.array(grid.upper) > upper + 1e-12):
            raise BadScenario(
                f"grid {grid.lower}..{grid.upper} leaves the domain of scenario '{system.name}'"
            )
        domain = (lower, upper)
    for special in system.special_points:
        location = np.atleast_1d(np.asarray(special.location, dtype=float))
        if grid.covers(location):
            if grid.index_of(location) is None:
                raise BadScenario(
                    f"special point {special.location} of scenario '{system.name}' is not a grid node",
                    special.location,
                )
        elif domain is not None and np.all(domain[0] <= location) and np.all(location <= domain[1]):
            raise BadScenario(
                f"special point {special.location} of scenario '{system.name}' lies outside the grid",
                special.location,
            )


def build_initial_bundle(system: ScenarioSystem, grid: Grid, workers: int = 1) -> Bundle:
    """
    Build H_0 over a grid.

    Args:
        system: Scenario system supplying A(x) and f(x)
        grid: Lattice over (a part of) the scenario domain
        workers: Thread count for node evaluation (results keep node order)

    Returns:
        Bundle of initial fibers

    Raises:
        BadScenario: For a grid outside the domain, a special point that is not
            a node, or a zero row away from special points
    """
    _check_grid(system, grid)
    nodes = grid.nodes
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            fibers = list(executor.map(system.fiber, nodes))
    else:
        fibers = [system.fiber(x) for x in nodes]
    logger.debug(
        f"BUNDLE_BUILT | scenario={system.name} | nodes={grid.node_count} | workers={workers}"
    )
    return Bundle(grid, tuple(fibers), system.fiber_dim)


def sample_data(system: ScenarioSystem, grid: Grid) -> np.ndarray:
    """Data values at every node, shape (node_count, n_constraints)."""
    return np.array([np.asarray(system.data(x), dtype=float).ravel() for x in grid.nodes])


def data_lipschitz(system: ScenarioSystem, grid: Grid) -> float:
    """
    Lipschitz bound of the data over the grid.

    Uses the scenario's declared bound when present, otherwise the largest
    axis-neighbor difference quotient of the sampled data.
    """
    if system.data_lipschitz is not None:
        return float(system.data_lipschitz)
    values = sample_data(system, grid).reshape(*grid.shape, -1)
    bound = 0.0
    for k, h in enumerate(grid.spacing):
        quotient = np.abs(np.diff(values, axis=k)) / h
        if quotient.size:
            bound = max(bound, float(quotient.max()))
    return bound


def default_window(system: ScenarioSystem, grid: Grid) -> Window:
    """Fiber window [-L, L]^M with L = WINDOW_SCALE * (1 + max node |f_i|)."""
    extent = float(np.max(np.abs(sample_data(system, grid)))) if grid.node_count else 0.0
    return Window.square(RefinementDefaults.window_half_width(extent), system.fiber_dim)

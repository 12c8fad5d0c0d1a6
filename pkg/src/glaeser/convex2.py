"""
Planar (and 1-D) convex-region kernel.

Fibers are stored in H-representation: a finite list of halfplanes
{y : normal . y <= offset} with unit normals. One-dimensional fibers use the
same representation with normals +1 / -1. All values are immutable, so every
function here is pure and safe to call from many workers at once.

Exact questions (emptiness, Chebyshev center, support) go through the HiGHS
linear programming backend of scipy. Bulk geometry (clipping to a bounding
window, Steiner points, sampled distances) works on the clipped polygon.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from src.glaeser.errors import DimMismatch, EmptyRegion
from src.settings import ToleranceConfig


@dataclass(frozen=True)
class HalfPlane:
    """The set {y : normal . y <= offset}, normalized to a unit normal."""

    normal: tuple[float, ...]
    offset: float

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float).ravel()
        if normal.size not in (1, 2):
            raise ValueError(f"HalfPlane normal must have 1 or 2 components, got {normal.size}")
        norm = float(np.linalg.norm(normal))
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("HalfPlane normal must be nonzero")
        offset = float(self.offset)
        if abs(norm - 1.0) > 1e-12:
            normal = normal / norm
            offset = offset / norm
        object.__setattr__(self, "normal", tuple(float(c) for c in normal))
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return len(self.normal)

    def evaluate(self, point: Sequence[float]) -> float:
        """Signed slack normal . point - offset (<= 0 inside)."""
        return float(np.dot(self.normal, point) - self.offset)


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    """
    Finite intersection of halfplanes in R^1 or R^2.

    An empty halfplane list is the whole space. Rows are normalized at
    construction; zero normals are rejected.
    """

    normals: np.ndarray
    offsets: np.ndarray
    fiber_dim: int = 2

    def __post_init__(self):
        if self.fiber_dim not in (1, 2):
            raise ValueError(f"fiber_dim must be 1 or 2, got {self.fiber_dim}")
        normals = np.array(self.normals, dtype=float).reshape(-1, self.fiber_dim)
        offsets = np.array(self.offsets, dtype=float).reshape(-1)
        if normals.shape[0] != offsets.shape[0]:
            raise ValueError("normals and offsets must have the same number of rows")
        norms = np.linalg.norm(normals, axis=1)
        if np.any(~np.isfinite(norms)) or np.any(norms == 0.0):
            raise ValueError("ConvexRegion rejects zero or non-finite halfplane normals")
        rescale = np.abs(norms - 1.0) > 1e-12
        if np.any(rescale):
            normals[rescale] /= norms[rescale, None]
            offsets[rescale] /= norms[rescale]
        normals.flags.writeable = False
        offsets.flags.writeable = False
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_halfplanes(cls, halfplanes: Iterable[HalfPlane], fiber_dim: int = 2) -> "ConvexRegion":
        halfplanes = list(halfplanes)
        for hp in halfplanes:
            if hp.dim != fiber_dim:
                raise DimMismatch(f"HalfPlane of dim {hp.dim} in a {fiber_dim}-D region")
        normals = np.array([hp.normal for hp in halfplanes], dtype=float).reshape(-1, fiber_dim)
        offsets = np.array([hp.offset for hp in halfplanes], dtype=float)
        return cls(normals, offsets, fiber_dim)

    @classmethod
    def full(cls, fiber_dim: int = 2) -> "ConvexRegion":
        return cls(np.zeros((0, fiber_dim)), np.zeros(0), fiber_dim)

    @classmethod
    def empty(cls, fiber_dim: int = 2) -> "ConvexRegion":
        """Canonical empty region: y_1 <= -1 and y_1 >= 1."""
        normals = np.zeros((2, fiber_dim))
        normals[0, 0], normals[1, 0] = 1.0, -1.0
        return cls(normals, np.array([-1.0, -1.0]), fiber_dim)

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float]) -> "ConvexRegion":
        """Axis-aligned box; infinite bounds are omitted."""
        lower = np.asarray(lower, dtype=float).ravel()
        upper = np.asarray(upper, dtype=float).ravel()
        dim = lower.size
        normals, offsets = [], []
        for axis in range(dim):
            unit = np.zeros(dim)
            unit[axis] = 1.0
            if np.isfinite(upper[axis]):
                normals.append(unit)
                offsets.append(upper[axis])
            if np.isfinite(lower[axis]):
                normals.append(-unit)
                offsets.append(-lower[axis])
        return cls(np.array(normals).reshape(-1, dim), np.array(offsets), dim)

    @classmethod
    def interval(cls, lower: float, upper: float) -> "ConvexRegion":
        return cls.box([lower], [upper])

    @classmethod
    def from_rows(cls, rows: np.ndarray, bounds: np.ndarray) -> "ConvexRegion":
        """Region {y : rows @ y <= bounds}."""
        rows = np.asarray(rows, dtype=float)
        return cls(rows, np.asarray(bounds, dtype=float), rows.shape[1])

    @classmethod
    def from_vertices(cls, points: np.ndarray) -> "ConvexRegion":
        """
        Convex hull of a point cloud in H-representation.

        Args:
            points: Array of shape (k, d)

        Returns:
            ConvexRegion whose set is the hull of the points

        Raises:
            EmptyRegion: If no points are given
        """
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.shape[0] == 0:
            raise EmptyRegion("cannot build a hull from zero points")
        dim = points.shape[1]
        if dim == 1:
            return cls.interval(points.min(), points.max())
        unique = np.unique(points, axis=0)
        if unique.shape[0] == 1:
            return cls.box(unique[0], unique[0])
        try:
            hull = ConvexHull(unique)
            return cls(hull.equations[:, :2], -hull.equations[:, 2], 2)
        except QhullError:
            return _segment_region(unique)

    # -- views ------------------------------------------------------------

    @property
    def size(self) -> int:
        return int(self.offsets.shape[0])

    @property
    def halfplanes(self) -> tuple[HalfPlane, ...]:
        return tuple(
            HalfPlane(tuple(n), float(o)) for n, o in zip(self.normals, self.offsets)
        )

    @cached_property
    def bounds(self) -> tuple[float, float]:
        """(lo, hi) of a 1-D region; +-inf for missing sides."""
        if self.fiber_dim != 1:
            raise DimMismatch("bounds() is defined for 1-D regions only")
        n = self.normals[:, 0]
        upper = self.offsets[n > 0] / n[n > 0]
        lower = self.offsets[n < 0] / n[n < 0]
        hi = float(upper.min()) if upper.size else np.inf
        lo = float(lower.max()) if lower.size else -np.inf
        return lo, hi

    def translated(self, shift: Sequence[float]) -> "ConvexRegion":
        """The region moved by the vector ``shift``."""
        shift = np.asarray(shift, dtype=float).ravel()
        return ConvexRegion(self.normals, self.offsets + self.normals @ shift, self.fiber_dim)

    def same_as(self, other: "ConvexRegion") -> bool:
        """Exact equality of the halfplane lists."""
        return (
            self.fiber_dim == other.fiber_dim
            and np.array_equal(self.normals, other.normals)
            and np.array_equal(self.offsets, other.offsets)
        )

    def __repr__(self) -> str:
        return f"ConvexRegion(dim={self.fiber_dim}, halfplanes={self.size})"


@dataclass(frozen=True)
class Window:
    """Axis-aligned bounding box in fiber space."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper) or len(lower) not in (1, 2):
            raise ValueError("Window bounds must be 1-D or 2-D and of equal length")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError(f"Window must have positive extent, got {lower} .. {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def square(cls, half_width: float, dim: int = 2) -> "Window":
        return cls((-half_width,) * dim, (half_width,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.subtract(self.upper, self.lower)))

    def as_region(self) -> ConvexRegion:
        return ConvexRegion.box(self.lower, self.upper)

    def corners(self) -> np.ndarray:
        """Corners in counter-clockwise order (2-D) or the two ends (1-D)."""
        if self.dim == 1:
            return np.array([[self.lower[0]], [self.upper[0]]])
        (x0, y0), (x1, y1) = self.lower, self.upper
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def _segment_region(points: np.ndarray) -> ConvexRegion:
    """Hull of collinear planar points: a segment as four halfplanes."""
    center = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - center)
    along, across = vt[0], vt[1]
    t = (points - center) @ along
    c = float(center @ across)
    normals = np.array([across, -across, along, -along])
    offsets = np.array([c, -c, center @ along + t.max(), -(center @ along + t.min())])
    return ConvexRegion(normals, offsets, 2)


def _check_dims(a: ConvexRegion, b: ConvexRegion) -> None:
    if a.fiber_dim != b.fiber_dim:
        raise DimMismatch(f"cannot combine {a.fiber_dim}-D and {b.fiber_dim}-D regions")


# -- polygon helpers --------------------------------------------------------


def _clip(vertices: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Clip a convex polygon (ccw vertex array) by one halfplane."""
    if vertices.shape[0] == 0:
        return vertices
    s = vertices @ normal - offset
    inside = s <= 0.0
    if inside.all():
        return vertices
    if not inside.any():
        return vertices[:0]
    following = np.roll(vertices, -1, axis=0)
    s_next = np.roll(s, -1)
    cross = inside != np.roll(inside, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(cross, s / (s - s_next), 0.0)
    crossing = vertices + t[:, None] * (following - vertices)
    stacked = np.stack([vertices, crossing], axis=1)
    mask = np.stack([inside, cross], axis=1)
    return _dedupe(stacked[mask])


def _dedupe(vertices: np.ndarray) -> np.ndarray:
    if vertices.shape[0] < 2:
        return vertices
    gaps = np.linalg.norm(vertices - np.roll(vertices, 1, axis=0), axis=1)
    keep = gaps > 1e-12
    if not keep.any():
        return vertices[:1]
    return vertices[keep]


def clip_polygon(
    vertices: np.ndarray, normals: np.ndarray, offsets: np.ndarray, tol: float = 0.0
) -> np.ndarray:
    """Clip a convex polygon by several halfplanes in the given order."""
    for normal, offset in zip(normals, offsets):
        vertices = _clip(vertices, normal, offset + tol)
        if vertices.shape[0] == 0:
            break
    return vertices


def polygon(
    region: ConvexRegion, window: Window, tol: Optional[float] = None
) -> np.ndarray:
    """
    Vertices of region ∩ window.

    Args:
        region: Convex region
        window: Bounding box of matching dimension
        tol: Clipping slack added to every offset (default LP feasibility tol)

    Returns:
        Array (k, 2) of counter-clockwise vertices for 2-D regions, or the
        two interval ends (2, 1) for 1-D regions; k == 0 when empty
    """
    if window.dim != region.fiber_dim:
        raise DimMismatch("window and region dimensions differ")
    if tol is None:
        tol = ToleranceConfig.LP_FEASIBILITY_TOL
    if region.fiber_dim == 1:
        lo, hi = region.bounds
        lo, hi = max(lo, window.lower[0]), min(hi, window.upper[0])
        if lo > hi + tol:
            return np.zeros((0, 1))
        if lo > hi:
            lo = hi = 0.5 * (lo + hi)
        return np.array([[lo], [hi]])
    return clip_polygon(window.corners(), region.normals, region.offsets, tol)


def polygon_area(vertices: np.ndarray) -> float:
    if vertices.shape[0] < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_distances(vertices: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Euclidean distances from points to a convex polygon.

    Args:
        vertices: Polygon vertices (k, d), counter-clockwise for d == 2
        points: Query points (m, d)

    Returns:
        Array (m,) of distances (zero inside)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if vertices.shape[0] == 0:
        raise EmptyRegion("distance to an empty polygon")
    if vertices.shape[1] == 1:
        lo, hi = vertices[:, 0].min(), vertices[:, 0].max()
        p = points[:, 0]
        return np.maximum(np.maximum(lo - p, p - hi), 0.0)
    if vertices.shape[0] == 1:
        return np.linalg.norm(points - vertices[0], axis=1)
    start = vertices
    edge = np.roll(vertices, -1, axis=0) - vertices
    rel = points[:, None, :] - start[None, :, :]
    length2 = np.sum(edge * edge, axis=1)
    safe = np.where(length2 > 0.0, length2, 1.0)
    t = np.clip(np.sum(rel * edge[None], axis=2) / safe, 0.0, 1.0)
    nearest = start[None] + t[..., None] * edge[None]
    dist = np.linalg.norm(points[:, None, :] - nearest, axis=2).min(axis=1)
    if polygon_area(vertices) > 1e-14:
        cross = edge[None, :, 0] * rel[..., 1] - edge[None, :, 1] * rel[..., 0]
        inside = np.all(cross >= -1e-12, axis=1)
        dist[inside] = 0.0
    return dist


def sample_boundary(vertices: np.ndarray, n: int) -> np.ndarray:
    """Vertices plus n points spread evenly along the polygon perimeter."""
    if vertices.shape[0] < 2 or vertices.shape[1] == 1:
        return vertices
    edge = np.roll(vertices, -1, axis=0) - vertices
    lengths = np.linalg.norm(edge, axis=1)
    perimeter = lengths.sum()
    if perimeter == 0.0:
        return vertices[:1]
    s = np.linspace(0.0, perimeter, n, endpoint=False)
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    idx = np.clip(np.searchsorted(cumulative, s, side="right") - 1, 0, len(lengths) - 1)
    frac = np.where(lengths[idx] > 0, (s - cumulative[idx]) / np.where(lengths[idx] > 0, lengths[idx], 1.0), 0.0)
    samples = vertices[idx] + frac[:, None] * edge[idx]
    return np.vstack([vertices, samples])


# -- kernel operations ------------------------------------------------------


def is_empty(region: ConvexRegion) -> bool:
    """
    Decide whether no point satisfies every halfplane.

    Args:
        region: Convex region

    Returns:
        True if the intersection is empty (within LP feasibility tolerance)
    """
    tol = ToleranceConfig.LP_FEASIBILITY_TOL
    if region.size == 0:
        return False
    if region.fiber_dim == 1:
        lo, hi = region.bounds
        return lo > hi + tol
    result = linprog(
        np.zeros(2),
        A_ub=region.normals,
        b_ub=region.offsets + tol,
        bounds=[(None, None), (None, None)],
        method="highs",
    )
    if result.status in (0, 2):
        return result.status == 2
    # HiGHS gave up (numerical trouble); fall back to clipping a wide window.
    return polygon(region, Window.square(1e6)).shape[0] == 0


def contains(region: ConvexRegion, point: Sequence[float], tol: float = 0.0) -> bool:
    """True iff normal . point <= offset + tol for every halfplane."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    point = np.asarray(point, dtype=float).ravel()
    if region.size == 0:
        return True
    return bool(np.all(region.normals @ point <= region.offsets + tol))


def project(region: ConvexRegion, point: Sequence[float]) -> np.ndarray:
    """
    Closest point of a nonempty region to ``point``.

    In the plane the projection has at most two active constraints, so the
    candidates are the feet on each boundary line and every pairwise vertex.

    Raises:
        EmptyRegion: If the region is empty
    """
    p = np.asarray(point, dtype=float).ravel()
    if region.fiber_dim == 1:
        lo, hi = region.bounds
        if lo > hi + ToleranceConfig.LP_FEASIBILITY_TOL:
            raise EmptyRegion("projection onto an empty interval")
        if lo > hi:
            return np.array([0.5 * (lo + hi)])
        return np.clip(p, lo, hi)
    if contains(region, p, 0.0):
        return p
    if is_empty(region):
        raise EmptyRegion("projection onto an empty region")
    normals, offsets = region.normals, region.offsets
    feet = p - (normals @ p - offsets)[:, None] * normals
    i, j = np.triu_indices(region.size, 1)
    det = normals[i, 0] * normals[j, 1] - normals[i, 1] * normals[j, 0]
    ok = np.abs(det) > 1e-12
    i, j, det = i[ok], j[ok], det[ok]
    vx = (offsets[i] * normals[j, 1] - offsets[j] * normals[i, 1]) / det
    vy = (normals[i, 0] * offsets[j] - normals[j, 0] * offsets[i]) / det
    candidates = np.vstack([feet, np.column_stack([vx, vy])])
    violation = np.max(candidates @ normals.T - offsets, axis=1).clip(min=0.0)
    scale = 1.0 + float(np.max(np.abs(offsets)))
    admissible = violation <= violation.min() + ToleranceConfig.MEMBERSHIP_TOL * scale
    gaps = np.linalg.norm(candidates - p, axis=1)
    gaps[~admissible] = np.inf
    return candidates[int(np.argmin(gaps))]


def distance(region: ConvexRegion, point: Sequence[float]) -> float:
    """
    Euclidean distance from a point to a nonempty region.

    Raises:
        EmptyRegion: If the region is empty
    """
    p = np.asarray(point, dtype=float).ravel()
    if region.size and contains(region, p, 0.0):
        return 0.0
    return float(np.linalg.norm(project(region, p) - p))


def intersect(a: ConvexRegion, b: ConvexRegion, prune: bool = False) -> ConvexRegion:
    """
    Set intersection of two regions.

    Args:
        a: First region
        b: Second region
        prune: Merge halfplanes with identical normals (keeps the tightest)

    Raises:
        DimMismatch: If the fiber dimensions differ
    """
    _check_dims(a, b)
    region = ConvexRegion(
        np.vstack([a.normals, b.normals]), np.concatenate([a.offsets, b.offsets]), a.fiber_dim
    )
    return prune_duplicates(region) if prune else region


def prune_duplicates(region: ConvexRegion) -> ConvexRegion:
    """Drop halfplanes whose normal repeats exactly, keeping the smallest offset."""
    if region.size < 2:
        return region
    unique, inverse = np.unique(region.normals, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    offsets = np.full(unique.shape[0], np.inf)
    np.minimum.at(offsets, inverse, region.offsets)
    return ConvexRegion(unique, offsets, region.fiber_dim)


def dilate(region: ConvexRegion, eps: float) -> ConvexRegion:
    """
    Outer approximation of the eps-neighborhood: every offset grows by eps.

    Equal to the true neighborhood for a single halfplane; a superset near
    vertices.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return ConvexRegion(region.normals, region.offsets + eps, region.fiber_dim)


def _clipped(region: ConvexRegion, window: Window) -> ConvexRegion:
    if window.dim != region.fiber_dim:
        raise DimMismatch("window and region dimensions differ")
    return intersect(region, window.as_region())


def _lp_or_empty(c, a_ub, b_ub, bounds, what: str):
    result = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if result.status != 0:
        raise EmptyRegion(f"{what}: region ∩ window is empty ({result.message})")
    return result


def chebyshev_center(region: ConvexRegion, window: Window) -> np.ndarray:
    """
    Center of a largest inscribed ball of region ∩ window.

    Ties are broken by the lexicographic minimum of the center coordinates.

    Raises:
        EmptyRegion: If region ∩ window is empty
    """
    tol = ToleranceConfig.LP_FEASIBILITY_TOL
    clipped = _clipped(region, window)
    if region.fiber_dim == 1:
        ends = polygon(region, window)
        if ends.shape[0] == 0:
            raise EmptyRegion("chebyshev_center: region ∩ window is empty")
        return np.array([0.5 * (ends[0, 0] + ends[1, 0])])
    normals, offsets = clipped.normals, clipped.offsets
    a_ub = np.hstack([normals, np.ones((clipped.size, 1))])
    free = [(None, None), (None, None)]
    stage = _lp_or_empty(
        np.array([0.0, 0.0, -1.0]), a_ub, offsets + tol, free + [(0.0, None)], "chebyshev_center"
    )
    radius = max(float(stage.x[2]) - tol, 0.0)
    b_fixed = offsets - radius + tol
    x1 = _lp_or_empty(np.array([1.0, 0.0]), normals, b_fixed, free, "chebyshev_center").x[0]
    bounds = [(None, float(x1) + tol), (None, None)]
    x2 = _lp_or_empty(np.array([0.0, 1.0]), normals, b_fixed, bounds, "chebyshev_center").x[1]
    return np.array([float(x1), float(x2)])


def support(region: ConvexRegion, direction: Sequence[float], window: Window) -> float:
    """
    Support function max{direction . y : y in region ∩ window}.

    Raises:
        EmptyRegion: If region ∩ window is empty
    """
    direction = np.asarray(direction, dtype=float).ravel()
    if region.fiber_dim == 1:
        ends = polygon(region, window)
        if ends.shape[0] == 0:
            raise EmptyRegion("support: region ∩ window is empty")
        return float(np.max(ends[:, 0] * direction[0]))
    clipped = _clipped(region, window)
    result = _lp_or_empty(
        -direction,
        clipped.normals,
        clipped.offsets + ToleranceConfig.LP_FEASIBILITY_TOL,
        [(None, None), (None, None)],
        "support",
    )
    return float(-result.fun)


def steiner_from_polygon(vertices: np.ndarray, n_dirs: int) -> np.ndarray:
    """Quadrature Steiner point (1/pi) * sum h(u_k) u_k dphi of a clipped polygon."""
    if vertices.shape[1] == 1:
        return np.array([0.5 * (vertices[:, 0].min() + vertices[:, 0].max())])
    phi = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    directions = np.column_stack([np.cos(phi), np.sin(phi)])
    heights = np.max(vertices @ directions.T, axis=0)
    return (2.0 / n_dirs) * (heights @ directions)


def steiner_point(
    region: ConvexRegion,
    window: Window,
    n_dirs: int = ToleranceConfig.STEINER_DIRECTIONS,
    tol: float = ToleranceConfig.MEMBERSHIP_TOL,
) -> np.ndarray:
    """
    Discretized Steiner point of region ∩ window.

    Args:
        region: Convex region
        window: Bounding box used to make the body compact
        n_dirs: Number of uniform quadrature directions (>= 8)
        tol: Membership tolerance before projecting back onto the region

    Raises:
        EmptyRegion: If region ∩ window is empty
    """
    if n_dirs < 8:
        raise ValueError("n_dirs must be at least 8")
    vertices = polygon(region, window)
    if vertices.shape[0] == 0:
        raise EmptyRegion("steiner_point: region ∩ window is empty")
    point = steiner_from_polygon(vertices, n_dirs)
    clipped = _clipped(region, window)
    if not contains(clipped, point, tol):
        point = project(clipped, point)
    return point


def hausdorff_sampled(
    a: ConvexRegion, b: ConvexRegion, window: Window, n: int = 256
) -> float:
    """
    Symmetric sampled Hausdorff distance of a ∩ window and b ∩ window.

    A test diagnostic: boundary samples of each body are measured against the
    other body.

    Raises:
        EmptyRegion: If either clipped region is empty
    """
    _check_dims(a, b)
    pa, pb = polygon(a, window), polygon(b, window)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise EmptyRegion("hausdorff_sampled: a clipped region is empty")
    forward = polygon_distances(pb, sample_boundary(pa, n)).max()
    backward = polygon_distances(pa, sample_boundary(pb, n)).max()
    return float(max(forward, backward))

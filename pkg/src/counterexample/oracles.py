"""
Exact analytic oracles for the four-field counterexample system.

Off the origin the system reads B(θ) F(x) <= f(x) with

    B(θ) = [[cos^4 θ,  sin^4 θ],
            [sin^4 θ, -cos^4 θ]]

stacked with its negation, θ = atan2(x2, x1). At the origin only the data
conditions 0 <= f1, f2, f4 and the halfplane 1e6 * F1 >= -f3 remain.

For constant data the set of values a continuous solution can take at the
origin is the intersection of four regions R1..R4 with that halfplane; the
region R3 is bounded by the hyperbola y2 = M + M^2 / (y1 - M), M = -f3, which
is why the feasible data set is not a polytope.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from src.glaeser.bundle import Grid
from src.glaeser.convex2 import Window
from src.glaeser.errors import DomainError
from src.glaeser.logging import get_logger

logger = get_logger("oracles")

# Coefficient of F1 in the origin row: -ORIGIN_WEIGHT * F1 <= f3.
ORIGIN_WEIGHT = 1e6


@dataclass(frozen=True)
class ConstantData:
    """Values of the four constant data fields."""

    f1: float
    f2: float
    f3: float
    f4: float

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "ConstantData":
        values = [float(v) for v in values]
        if len(values) != 4:
            raise ValueError(f"constant data needs 4 values, got {len(values)}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3, self.f4])

    def scaled(self, factor: float) -> "ConstantData":
        return ConstantData.from_sequence(factor * self.as_array())


DataLike = Union[ConstantData, Sequence[float], np.ndarray]


def _as_data(f: DataLike) -> ConstantData:
    return f if isinstance(f, ConstantData) else ConstantData.from_sequence(f)


def B_matrix(theta: float) -> np.ndarray:
    """
    Coefficient block B(θ) of the counterexample system.

    Raises:
        DomainError: If θ lies outside [0, π/2]
    """
    if not -1e-12 <= theta <= np.pi / 2 + 1e-12:
        raise DomainError(f"theta={theta} outside [0, pi/2]")
    c, s = np.cos(theta) ** 4, np.sin(theta) ** 4
    return np.array([[c, s], [s, -c]])


def b_inverse_norm(theta: float) -> float:
    """Spectral norm of B(θ)^-1 (at most 4 on [0, π/2])."""
    return float(np.linalg.norm(np.linalg.inv(B_matrix(theta)), 2))


def h0_nonempty(f: DataLike, x: Sequence[float]) -> bool:
    """
    Nonemptiness of the unrefined fiber at x.

    True at the origin (the data conditions are handled separately); away from
    it iff -f3 <= f1 and -f4 <= f2.
    """
    f = _as_data(f)
    if np.all(np.asarray(x, dtype=float) == 0.0):
        return True
    return -f.f3 <= f.f1 and -f.f4 <= f.f2


def V(y1: float, a, M: float):
    """
    Lower bound on y2 imposed by the direction with parameter a.

    ``a`` may be an array of parameters; the result then has its shape.

    Raises:
        DomainError: For a outside (0, 1]
    """
    a = np.asarray(a, dtype=float)
    if np.any((a <= 0.0) | (a > 1.0)):
        raise DomainError(f"a outside (0, 1]: {a.min():.6g}..{a.max():.6g}")
    value = (M - (1.0 - a) ** 2 * y1) / a ** 2
    return float(value) if value.ndim == 0 else value


def W(y1: float, M: float) -> float:
    """
    Hyperbolic boundary M + M^2 / (y1 - M), the maximum of V over a.

    Raises:
        DomainError: For y1 <= M or M <= 0
    """
    if M <= 0:
        raise DomainError(f"M={M} must be positive")
    if y1 <= M:
        raise DomainError(f"y1={y1} must exceed M={M}")
    return M + M * M / (y1 - M)


@dataclass(frozen=True)
class AnalyticH1Spec:
    """
    Closed-form description of the refined origin fiber for constant data.

    ``M`` is None when f3 >= 0 (R3 is then a quadrant).
    """

    data: ConstantData
    M: Optional[float]
    r1_upper: tuple[float, float]
    r2_r4_lower: tuple[float, float]
    r2_r4_upper: tuple[float, float]
    r3_lower: Optional[tuple[float, float]]
    origin_lower: float

    @classmethod
    def from_data(cls, f: DataLike) -> "AnalyticH1Spec":
        f = _as_data(f)
        hyperbolic = f.f3 < 0
        return cls(
            data=f,
            M=-f.f3 if hyperbolic else None,
            r1_upper=(f.f1, f.f1),
            r2_r4_lower=(-f.f4, -f.f2),
            r2_r4_upper=(f.f2, f.f4),
            r3_lower=None if hyperbolic else (-f.f3, -f.f3),
            origin_lower=-f.f3 / ORIGIN_WEIGHT,
        )

    @property
    def data_conditions_hold(self) -> bool:
        return min(self.data.f1, self.data.f2, self.data.f4) >= 0

    def contains(self, y: Sequence[float], tol: float = 0.0) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        if not self.data_conditions_hold:
            return False
        y1, y2 = (float(v) for v in y)
        if y1 < self.origin_lower - tol:
            return False
        if y1 > self.r1_upper[0] + tol or y2 > self.r1_upper[1] + tol:
            return False
        lo, hi = self.r2_r4_lower, self.r2_r4_upper
        if not (lo[0] - tol <= y1 <= hi[0] + tol and lo[1] - tol <= y2 <= hi[1] + tol):
            return False
        if self.M is None:
            return y1 >= self.r3_lower[0] - tol and y2 >= self.r3_lower[1] - tol
        if y1 <= self.M:
            return False
        return y2 >= W(y1, self.M) - tol


def h1_origin_contains(y: Sequence[float], f: DataLike, tol: float = 0.0) -> bool:
    """Membership of y in the analytic refined origin fiber."""
    return AnalyticH1Spec.from_data(f).contains(y, tol)


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Decision with either a witness value at the origin or a cause."""

    feasible: bool
    witness: Optional[tuple[float, ...]] = None
    cause: Optional[str] = None
    location: Optional[tuple[float, ...]] = None

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "witness": list(self.witness) if self.witness is not None else None,
            "cause": self.cause,
            "location": list(self.location) if self.location is not None else None,
        }


def feasibility_constant(f: DataLike) -> FeasibilityVerdict:
    """
    Decide whether constant data admits a continuous solution.

    The top-right corner (min(f1, f2), min(f1, f4)) of R1 ∩ R2 ∩ R4 is tested
    against R3; R3 is closed upward in both coordinates, so the corner decides.
    """
    f = _as_data(f)
    if min(f.f1, f.f2, f.f4) < 0:
        return FeasibilityVerdict(False, cause="data condition at origin: f1, f2, f4 must be >= 0")
    if -f.f3 > f.f1:
        return FeasibilityVerdict(False, cause="fiber empty off origin: -f3 > f1")
    if -f.f4 > f.f2:
        return FeasibilityVerdict(False, cause="fiber empty off origin: -f4 > f2")
    corner = (min(f.f1, f.f2), min(f.f1, f.f4))
    if f.f3 >= 0:
        return FeasibilityVerdict(True, witness=corner)
    M = -f.f3
    if corner[0] <= M:
        return FeasibilityVerdict(
            False, cause=f"origin fiber empty: corner y1={corner[0]:.6g} <= M={M:.6g}"
        )
    bound = W(corner[0], M)
    if corner[1] < bound:
        return FeasibilityVerdict(
            False,
            cause=f"origin fiber empty: corner y2={corner[1]:.6g} below hyperbola {bound:.6g}",
        )
    return FeasibilityVerdict(True, witness=corner)


def feasibility_field(data: Callable[[np.ndarray], np.ndarray], grid: Grid) -> FeasibilityVerdict:
    """
    Pointwise decision for non-constant data sampled on a grid.

    Nonemptiness is checked at every node away from the origin, and the
    constant-data test is applied to f(0) when the origin is a node.
    """
    origin_index = grid.index_of(np.zeros(grid.dim))
    for index, x in enumerate(grid.nodes):
        if index == origin_index:
            continue
        values = np.asarray(data(x), dtype=float).ravel()
        if not h0_nonempty(values, x):
            return FeasibilityVerdict(
                False,
                cause="fiber empty off origin",
                location=tuple(float(c) for c in x),
            )
    if origin_index is None:
        return FeasibilityVerdict(True)
    verdict = feasibility_constant(np.asarray(data(np.zeros(grid.dim)), dtype=float).ravel())
    if not verdict.feasible:
        return FeasibilityVerdict(False, cause=verdict.cause, location=(0.0,) * grid.dim)
    return verdict


def analytic_h1_polygon(f: DataLike, window: Window, n: int = 512) -> np.ndarray:
    """
    Inner polygon of the analytic origin fiber clipped to a window.

    Chords of the convex hyperbola lie above it, so the polygon is contained
    in the true set.

    Returns:
        Counter-clockwise vertices (k, 2); empty when the set misses the window
    """
    spec = AnalyticH1Spec.from_data(f)
    if not spec.data_conditions_hold:
        return np.zeros((0, 2))
    lo1 = max(spec.r2_r4_lower[0], spec.origin_lower, window.lower[0])
    lo2 = max(spec.r2_r4_lower[1], window.lower[1])
    hi1 = min(spec.r1_upper[0], spec.r2_r4_upper[0], window.upper[0])
    hi2 = min(spec.r1_upper[1], spec.r2_r4_upper[1], window.upper[1])
    if spec.M is None:
        lo1, lo2 = max(lo1, spec.r3_lower[0]), max(lo2, spec.r3_lower[1])
        if lo1 > hi1 or lo2 > hi2:
            return np.zeros((0, 2))
        return np.array([[lo1, lo2], [hi1, lo2], [hi1, hi2], [lo1, hi2]])

    M = spec.M
    if hi2 <= M:
        return np.zeros((0, 2))
    # W(y1) <= hi2 from this abscissa on
    start = max(lo1, M + M * M / (hi2 - M))
    if start > hi1:
        return np.zeros((0, 2))
    y1 = np.linspace(start, hi1, n)
    y2 = np.maximum(M + M * M / (y1 - M), lo2)
    lower = np.column_stack([y1, np.minimum(y2, hi2)])
    vertices = np.vstack([lower, [[hi1, hi2], [start, hi2]]])
    keep = np.ones(len(vertices), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(vertices, axis=0)) > 1e-12, axis=1)
    vertices = vertices[keep]
    if len(vertices) > 1 and np.allclose(vertices[0], vertices[-1]):
        vertices = vertices[:-1]
    return vertices


def intro_1d_feasible(
    f: Callable[[float], float],
    derivative: Optional[float] = None,
    domain: Optional[tuple[float, float]] = None,
    samples: int = 2001,
    step: float = 1e-6,
    tol: float = 1e-9,
) -> bool:
    """
    Decide the one-dimensional model x^2 F <= f <= x F (x >= 0), x F <= f <= x^2 F (x <= 0).

    A continuous solution exists iff f(0) = 0 and f'(0) >= 0. When ``domain``
    is given, the pointwise condition f(x) / x <= f(x) / x^2 for x > 0 is
    also checked on ``samples`` points.

    Args:
        f: Scalar data function
        derivative: f'(0); estimated by a central difference when omitted
        domain: Optional interval for the pointwise check
        samples: Number of sample points of the pointwise check
        step: Central difference step
        tol: Tolerance of the f(0) and f'(0) tests
    """
    if abs(f(0.0)) > tol:
        return False
    slope = derivative if derivative is not None else (f(step) - f(-step)) / (2.0 * step)
    if slope < -tol:
        return False
    if domain is None:
        return True
    xs = np.linspace(domain[0], domain[1], samples)
    for x in xs[xs > 0]:
        value = f(float(x))
        # value / x <= value / x^2  <=>  value * (x - 1) <= 0
        if value * (x - 1.0) > tol:
            logger.debug(f"INTRO_POINTWISE_FAIL | x={x:.6g} | f={value:.6g}")
            return False
    return True

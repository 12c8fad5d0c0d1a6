"""
Scenario registry.

A scenario builder turns data (constant values, a field callable or explicit
rows) into a ScenarioSystem. Builders register under the names the CLI uses.
"""

from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np

from src.counterexample.oracles import ORIGIN_WEIGHT, ConstantData
from src.glaeser.bundle import ConstraintRow, ScenarioSystem, SpecialPoint, constant_field
from src.glaeser.errors import BadScenario

_SCENARIO_REGISTRY: Dict[str, Callable[..., ScenarioSystem]] = {}

PAPER_DOMAIN = ((0.0, 0.0), (1.0, 1.0))
INTRO_DOMAIN = ((-1.0,), (1.0,))


def register_scenario(name: str):
    """Decorator to register a scenario builder under a CLI name."""

    def decorator(func):
        _SCENARIO_REGISTRY[name] = func
        return func

    return decorator


def scenario_names() -> list[str]:
    return sorted(_SCENARIO_REGISTRY)


def get_builder(name: str) -> Callable[..., ScenarioSystem]:
    """
    Raises:
        BadScenario: For an unregistered name
    """
    try:
        return _SCENARIO_REGISTRY[name]
    except KeyError:
        raise BadScenario(
            f"unknown scenario '{name}'; known: {', '.join(scenario_names())}"
        ) from None


def paper_rows(x: np.ndarray) -> tuple[ConstraintRow, ...]:
    """Rows (c, s), (s, -c), (-c, -s), (-s, c) with c = cos^4 θ, s = sin^4 θ."""
    x1, x2 = float(x[0]), float(x[1])
    r2 = x1 * x1 + x2 * x2
    c, s = x1 ** 4 / r2 ** 2, x2 ** 4 / r2 ** 2
    return (
        ConstraintRow((c, s), 0),
        ConstraintRow((s, -c), 1),
        ConstraintRow((-c, -s), 2),
        ConstraintRow((-s, c), 3),
    )


PAPER_ORIGIN = SpecialPoint(
    (0.0, 0.0),
    (
        ConstraintRow((0.0, 0.0), 0),
        ConstraintRow((0.0, 0.0), 1),
        ConstraintRow((0.0, 0.0), 3),
        ConstraintRow((-ORIGIN_WEIGHT, 0.0), 2),
    ),
)


@register_scenario("paper-2d")
def build_paper_system(
    f: Union[ConstantData, Sequence[float], Callable[[np.ndarray], np.ndarray]],
    data_lipschitz: Optional[float] = None,
    domain=PAPER_DOMAIN,
) -> ScenarioSystem:
    """
    Four-field counterexample system on the unit square.

    Args:
        f: Constant data or a field x -> (f1, f2, f3, f4)
        data_lipschitz: Lipschitz bound of a field (0 for constant data)
        domain: Lower and upper corners of the domain
    """
    if callable(f):
        data = f
    else:
        values = f if isinstance(f, ConstantData) else ConstantData.from_sequence(f)
        data = constant_field(values.as_array())
        data_lipschitz = 0.0
    return ScenarioSystem(
        name="paper-2d",
        fiber_dim=2,
        n_constraints=4,
        coeff_rows=paper_rows,
        data=data,
        special_points=(PAPER_ORIGIN,),
        domain=domain,
        data_lipschitz=data_lipschitz,
    )


def intro_rows(x: np.ndarray) -> tuple[ConstraintRow, ...]:
    """x >= 0: x^2 F <= f, -x F <= -f;  x < 0: x F <= f, -x^2 F <= -f."""
    t = float(x[0])
    if t >= 0:
        return (ConstraintRow((t * t,), 0), ConstraintRow((-t,), 1))
    return (ConstraintRow((t,), 2), ConstraintRow((-t * t,), 3))


INTRO_ORIGIN = SpecialPoint((0.0,), tuple(ConstraintRow((0.0,), k) for k in range(4)))


@register_scenario("intro-1d")
def build_intro_system(
    f: Callable[[float], float],
    data_lipschitz: Optional[float] = None,
    domain=INTRO_DOMAIN,
) -> ScenarioSystem:
    """
    One-dimensional model with indicator coefficients.

    Args:
        f: Scalar data function
        data_lipschitz: Lipschitz bound of f, sampled on the grid when omitted
        domain: Interval of the domain
    """

    def data(x: np.ndarray) -> np.ndarray:
        value = float(f(float(np.atleast_1d(x)[0])))
        return np.array([value, -value, value, -value])

    return ScenarioSystem(
        name="intro-1d",
        fiber_dim=1,
        n_constraints=4,
        coeff_rows=intro_rows,
        data=data,
        special_points=(INTRO_ORIGIN,),
        domain=domain,
        data_lipschitz=data_lipschitz,
    )


@register_scenario("custom")
def build_custom_system(
    rows: Sequence[Sequence[float]],
    f: Union[Sequence[float], Callable[[np.ndarray], np.ndarray]],
    domain,
    data_lipschitz: Optional[float] = None,
) -> ScenarioSystem:
    """
    System with constant coefficient rows A F <= f(x).

    Args:
        rows: Coefficient matrix (k, M), no zero rows
        f: Constant bounds (k,) or a field x -> bounds
        domain: Lower and upper corners of the domain
        data_lipschitz: Lipschitz bound of a field (0 for constant bounds)

    Raises:
        BadScenario: For a zero row or a fiber dimension other than 1 or 2
    """
    matrix = np.asarray(rows, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] not in (1, 2):
        raise BadScenario("custom rows must form a (k, 1) or (k, 2) matrix")
    if np.any(np.linalg.norm(matrix, axis=1) == 0.0):
        raise BadScenario("custom rows must not contain zero rows")
    fixed = tuple(ConstraintRow(tuple(row), k) for k, row in enumerate(matrix))
    if callable(f):
        data = f
    else:
        data = constant_field(f)
        data_lipschitz = 0.0
    return ScenarioSystem(
        name="custom",
        fiber_dim=int(matrix.shape[1]),
        n_constraints=int(matrix.shape[0]),
        coeff_rows=lambda x: fixed,
        data=data,
        domain=domain,
        data_lipschitz=data_lipschitz,
    )

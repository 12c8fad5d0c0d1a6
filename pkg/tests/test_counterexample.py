"""
Property-based tests for the analytic counterexample oracles.

**Feature: glaeser-refinement**
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st, settings

from src.counterexample.oracles import (
    AnalyticH1Spec,
    ConstantData,
    B_matrix,
    V,
    W,
    analytic_h1_polygon,
    b_inverse_norm,
    feasibility_constant,
    feasibility_field,
    h0_nonempty,
    h1_origin_contains,
    intro_1d_feasible,
)
from src.counterexample.scenarios import get_builder, scenario_names
from src.glaeser.bundle import Grid, affine_field, constant_field
from src.glaeser.convex2 import Window
from src.glaeser.errors import BadScenario, DomainError


theta_strategy = st.floats(min_value=0.0, max_value=math.pi / 2)
positive = st.floats(min_value=0.05, max_value=5.0)

HALF_STEPS = [float(v) for v in np.arange(-6, 7) * 0.5]
# multiples of 1/32 on [-5, 5]; every half-step value is a lattice point
WITNESS_AXIS = np.arange(-160, 161) / 32.0


def grid_witness_exists(f) -> bool:
    """Search the origin fiber's defining inequalities on a lattice of values."""
    f1, f2, f3, f4 = f
    if min(f1, f2, f4) < 0 or -f3 > f1 or -f4 > f2:
        return False
    y1, y2 = np.meshgrid(WITNESS_AXIS, WITNESS_AXIS, indexing="ij")
    ok = (y1 >= -f3 / 1e6) & (y1 <= f1) & (y2 <= f1)
    ok &= (y1 >= -f4) & (y1 <= f2) & (y2 >= -f2) & (y2 <= f4)
    if f3 >= 0:
        ok &= (y1 >= -f3) & (y2 >= -f3)
    else:
        M = -f3
        above = y1 > M
        ok &= above & (y2 >= M + M * M / np.where(above, y1 - M, 1.0))
    return bool(ok.any())


class TestProperty11CoefficientBlock:
    """
    **Feature: glaeser-refinement, Property 11: Coefficient Block**

    *For any* θ in [0, π/2], B(θ) SHALL be invertible with inverse norm
    1 / sqrt(cos^8 θ + sin^8 θ), at most 4.
    """

    @settings(max_examples=100)
    @given(theta=theta_strategy)
    def test_inverse_norm(self, theta):
        c, s = math.cos(theta) ** 4, math.sin(theta) ** 4
        expected = 1.0 / math.sqrt(c * c + s * s)
        assert math.isclose(b_inverse_norm(theta), expected, rel_tol=1e-9)
        assert b_inverse_norm(theta) <= 4.0

    def test_entries(self):
        assert np.allclose(B_matrix(0.0), [[1.0, 0.0], [0.0, -1.0]])
        assert np.allclose(B_matrix(math.pi / 4), [[0.25, 0.25], [0.25, -0.25]])

    def test_outside_quarter_turn(self):
        with pytest.raises(DomainError):
            B_matrix(-0.1)
        with pytest.raises(DomainError):
            B_matrix(2.0)

    def test_bound_on_dense_theta_grid(self):
        norms = np.array([b_inverse_norm(float(t)) for t in np.linspace(0.0, math.pi / 2, 10_000)])
        assert norms.max() <= 4.0
        assert norms.max() == pytest.approx(math.sqrt(8.0), rel=1e-5)
        assert norms[0] == pytest.approx(1.0) and norms[-1] == pytest.approx(1.0)


class TestProperty12HyperbolicEnvelope:
    """
    **Feature: glaeser-refinement, Property 12: Hyperbolic Envelope**

    *For any* M > 0 and y1 > M, W(y1, M) SHALL be the maximum over a in (0, 1]
    of V(y1, a, M), attained at a = 1 - M / y1.
    """

    @settings(max_examples=100)
    @given(M=positive, excess=positive)
    def test_envelope_is_maximum(self, M, excess):
        y1 = M + excess
        w = W(y1, M)
        a_star = 1.0 - M / y1
        assert math.isclose(V(y1, a_star, M), w, rel_tol=1e-9)
        for a in np.linspace(0.01, 1.0, 100):
            assert V(y1, float(a), M) <= w * (1 + 1e-9) + 1e-12

    def test_known_value(self):
        assert W(2.0, 1.0) == 2.0
        assert W(3.0, 1.0) == 1.5

    def test_domains(self):
        with pytest.raises(DomainError):
            V(1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            V(1.0, 1.5, 1.0)
        with pytest.raises(DomainError):
            W(1.0, 1.0)
        with pytest.raises(DomainError):
            W(2.0, 0.0)

    @pytest.mark.parametrize("M", [0.1, 1.0, 2.0])
    @pytest.mark.parametrize("offset", ["M+0.1", "M+1", "10M"])
    def test_maximum_over_dense_parameter_grid(self, M, offset):
        y1 = {"M+0.1": M + 0.1, "M+1": M + 1.0, "10M": 10.0 * M}[offset]
        a = np.linspace(0.0, 1.0, 1_000_001)[1:]
        values = V(y1, a, M)
        assert values.shape == a.shape
        assert values.max() == pytest.approx(W(y1, M), rel=1e-6)
        assert values.max() <= W(y1, M) * (1 + 1e-12)


class TestProperty13ConstantFeasibility:
    """
    **Feature: glaeser-refinement, Property 13: Constant-Data Feasibility**

    *For any* f1 large enough and f3 = -1, constant data SHALL be feasible
    exactly when f2 > 1 and f4 >= 1 + 1 / (f2 - 1), with a witness in the
    analytic origin fiber.
    """

    @settings(max_examples=100)
    @given(f2=st.floats(min_value=1.05, max_value=5.0), delta=st.floats(min_value=1e-6, max_value=1.0))
    def test_boundary_is_hyperbola(self, f2, delta):
        w = W(f2, 1.0)
        above = feasibility_constant((100.0, f2, -1.0, w + delta))
        below = feasibility_constant((100.0, f2, -1.0, w - delta))
        assert above.feasible and not below.feasible
        assert h1_origin_contains(above.witness, (100.0, f2, -1.0, w + delta), 1e-9)
        assert "hyperbola" in below.cause

    @pytest.mark.parametrize(
        "f, feasible, cause",
        [
            ((3.0, 2.0, -1.0, 2.0), True, None),
            ((3.0, 2.0, -1.0, 1.9), False, "hyperbola"),
            ((3.0, 3.0, 0.5, 3.0), True, None),
            ((1.0, 1.0, -2.0, 0.0), False, "-f3 > f1"),
            ((3.0, -1.0, -1.0, 2.0), False, "data condition"),
            ((3.0, 1.0, -1.0, 3.0), False, "M="),
        ],
    )
    def test_examples(self, f, feasible, cause):
        verdict = feasibility_constant(f)
        assert verdict.feasible is feasible
        if cause is not None:
            assert cause in verdict.cause

    def test_witness_of_tight_example(self):
        verdict = feasibility_constant(ConstantData(3.0, 2.0, -1.0, 2.0))
        assert verdict.witness == (2.0, 2.0)
        assert verdict.to_dict()["witness"] == [2.0, 2.0]

    @pytest.mark.parametrize("scale", [0.1, 2.0, 10.0])
    @pytest.mark.parametrize("f", [(3.0, 2.0, -1.0, 2.5), (3.0, 2.0, -1.0, 1.5), (3.0, 3.0, 0.5, 3.0)])
    def test_scale_invariance(self, f, scale):
        data = ConstantData.from_sequence(f)
        assert feasibility_constant(data.scaled(scale)).feasible == feasibility_constant(data).feasible

    def test_sequence_length_checked(self):
        with pytest.raises(ValueError):
            ConstantData.from_sequence([1.0, 2.0])

    @settings(max_examples=200)
    @given(f=st.tuples(*[st.sampled_from(HALF_STEPS)] * 4))
    def test_agrees_with_grid_witness_search(self, f):
        assert feasibility_constant(f).feasible is grid_witness_exists(f)

    @settings(max_examples=100)
    @given(f=st.tuples(*[st.sampled_from(HALF_STEPS)] * 4), scale=st.sampled_from([0.25, 0.5, 2.0, 4.0]))
    def test_random_scaling(self, f, scale):
        base = feasibility_constant(f)
        scaled = feasibility_constant(ConstantData.from_sequence(f).scaled(scale))
        assert scaled.feasible is base.feasible
        if base.feasible:
            assert scaled.witness == pytest.approx(tuple(scale * w for w in base.witness))


class TestAnalyticOriginFiber:
    """Closed-form origin fiber and its polygon."""

    def test_membership(self):
        f = (3.0, 2.0, -1.0, 2.0)
        assert h1_origin_contains((2.0, 2.0), f)
        assert not h1_origin_contains((2.0, 1.9), f)
        assert not h1_origin_contains((2.1, 2.0), f)
        assert not h1_origin_contains((2.0, 2.0), (3.0, -1.0, -1.0, 2.0))

    def test_quadrant_case(self):
        spec = AnalyticH1Spec.from_data((3.0, 2.5, 0.5, 2.0))
        assert spec.M is None and spec.r3_lower == (-0.5, -0.5)
        assert spec.contains((0.0, -0.5))
        assert not spec.contains((-0.1, 0.0))

    def test_tight_polygon_is_a_point(self):
        vertices = analytic_h1_polygon((3.0, 2.0, -1.0, 2.0), Window.square(32.0))
        assert vertices.shape == (1, 2)
        assert np.allclose(vertices[0], [2.0, 2.0])

    def test_polygon_inside_set(self):
        f = (3.0, 3.0, -1.0, 3.0)
        vertices = analytic_h1_polygon(f, Window.square(32.0), n=128)
        assert vertices.shape[0] > 3
        for y in vertices:
            assert h1_origin_contains(y, f, 1e-9)

    def test_polygon_of_infeasible_data_is_empty(self):
        assert analytic_h1_polygon((3.0, 1.0, -1.0, 3.0), Window.square(32.0)).shape[0] == 0

    def test_unrefined_fiber(self):
        assert h0_nonempty((3.0, 2.0, -1.0, 2.0), (0.5, 0.5))
        assert not h0_nonempty((1.0, 1.0, -2.0, 0.0), (0.5, 0.5))
        assert h0_nonempty((1.0, 1.0, -2.0, 0.0), (0.0, 0.0))


class TestFieldFeasibility:
    """Sampled decision for data fields."""

    def test_constant_field_agrees(self):
        grid = Grid.square(0.0, 1.0, 5)
        verdict = feasibility_field(constant_field([3.0, 2.0, -1.0, 2.0]), grid)
        assert verdict.feasible and verdict.witness == (2.0, 2.0)

    def test_empty_fiber_located(self):
        grid = Grid.square(0.0, 1.0, 5)
        field = affine_field([1.0, 1.0, -0.5, 1.0], [[0.0, 0.0], [0.0, 0.0], [-2.0, 0.0], [0.0, 0.0]])
        verdict = feasibility_field(field, grid)
        assert not verdict.feasible
        assert verdict.location is not None and verdict.location[0] > 0.25


class TestIntroModel:
    """One-dimensional model decisions."""

    @pytest.mark.parametrize(
        "f, domain, expected",
        [
            (lambda x: x, (-1.0, 1.0), True),
            (lambda x: x * x, (-1.0, 1.0), True),
            (lambda x: -x, None, False),
            (lambda x: x + 0.1, None, False),
            (lambda x: x - 2 * x * x, None, True),
            (lambda x: x - 2 * x * x, (-1.0, 1.0), False),
        ],
    )
    def test_decisions(self, f, domain, expected):
        assert intro_1d_feasible(f, domain=domain) is expected

    def test_explicit_derivative(self):
        assert not intro_1d_feasible(lambda x: 0.0, derivative=-1.0)


class TestScenarioRegistry:
    """Scenario builders registered by CLI name."""

    def test_names(self):
        assert scenario_names() == ["custom", "intro-1d", "paper-2d"]

    def test_unknown_name(self):
        with pytest.raises(BadScenario):
            get_builder("nope")


class TestWorkedValues:
    """Hand-checked values of the closed forms."""

    def test_envelope_values(self):
        assert V(2.0, 1.0, 1.0) == 1.0
        assert V(2.0, 0.5, 1.0) == pytest.approx(2.0)
        assert W(101.0, 1.0) == pytest.approx(1.01)

    @settings(max_examples=100)
    @given(M=positive, excess=positive)
    def test_hyperbola_identity(self, M, excess):
        y1 = M + excess
        assert W(y1, M) * (y1 - M) - M * y1 == pytest.approx(0.0, abs=1e-12 * (1 + M * y1))

    def test_origin_membership_examples(self):
        f = (3.0, 2.0, -1.0, 2.0)
        assert not h1_origin_contains((1.5, 1.5), f)
        assert not h1_origin_contains((0.0, 0.0), f)

    def test_decision_examples(self):
        assert not feasibility_constant((3.0, 1.5, -1.0, 1.5)).feasible
        zero = feasibility_constant((0.0, 0.0, 0.0, 0.0))
        assert zero.feasible and zero.witness == (0.0, 0.0)
        assert intro_1d_feasible(lambda x: 0.0)
        for f2, f4, expected in [(2.0, 2.0, True), (3.0, 3.0, True), (1.2, 2.9, False)]:
            assert feasibility_constant((3.0, f2, -1.0, f4)).feasible is expected

    @settings(max_examples=100)
    @given(
        f=st.tuples(*[st.floats(min_value=-3.0, max_value=3.0)] * 4),
        index=st.integers(min_value=0, max_value=3),
        raise_by=st.floats(min_value=0.0, max_value=2.0),
    )
    def test_raising_data_keeps_feasibility(self, f, index, raise_by):
        if not feasibility_constant(f).feasible:
            return
        raised = list(f)
        raised[index] += raise_by
        assert feasibility_constant(raised).feasible

    @settings(max_examples=200)
    @given(f=st.tuples(*[st.floats(min_value=-3.0, max_value=3.0)] * 4))
    def test_witness_lies_in_origin_fiber(self, f):
        verdict = feasibility_constant(f)
        if verdict.feasible:
            assert h1_origin_contains(verdict.witness, f, 1e-9)
            assert all(h0_nonempty(f, x) for x in [(1.0, 0.0), (0.6, 0.8), (0.0, 1.0)])

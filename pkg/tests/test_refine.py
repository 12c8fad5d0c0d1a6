"""
Property-based tests for the discretized refinement.

**Feature: glaeser-refinement**
"""

from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, strategies as st, settings

from src.counterexample.oracles import analytic_h1_polygon, intro_1d_feasible
from src.counterexample.scenarios import build_custom_system, build_intro_system, build_paper_system
from src.glaeser.bundle import Bundle, Grid, build_initial_bundle
from src.glaeser.convex2 import (
    ConvexRegion,
    Window,
    contains,
    hausdorff_sampled,
    polygon,
    polygon_distances,
)
from src.glaeser.errors import NotStabilized, TooLarge
from src.glaeser.refine import (
    LinearEpsilon,
    RefinementConfig,
    RefinementReport,
    brute_force_refine,
    neighbor_offsets,
    node_neighbors,
    refine_once,
    refine_to_stable,
)


PAPER_FEASIBLE = (3.0, 2.0, -1.0, 2.0)
PAPER_WIDE = (3.0, 3.0, -1.0, 3.0)


def paper_run(f, resolution=9, radius=1.5):
    system = build_paper_system(f)
    grid = Grid.square(0.0, 1.0, resolution)
    config = RefinementConfig.for_system(system, grid, neighbor_radius=radius)
    bundle = build_initial_bundle(system, grid)
    refined, report = refine_to_stable(bundle, config)
    return grid, config, bundle, refined, report


@lru_cache(maxsize=None)
def default_run(f, resolution):
    """Paper run with the configuration for_system picks on its own."""
    system = build_paper_system(f)
    grid = Grid.square(0.0, 1.0, resolution)
    config = RefinementConfig.for_system(system, grid)
    refined, report = refine_to_stable(build_initial_bundle(system, grid), config)
    return grid, config, refined, report


def intro_run(f, nodes):
    system = build_intro_system(f)
    grid = Grid((-1.0,), (1.0,), (nodes,))
    config = RefinementConfig.for_system(system, grid)
    bundle = build_initial_bundle(system, grid)
    return grid, config, bundle, refine_to_stable(bundle, config)


def sign_system():
    return build_custom_system([[1.0], [-1.0]], lambda x: np.array([np.sign(x[0]), -np.sign(x[0])]), ((-1.0,), (1.0,)))


class TestProperty8RefinementContracts:
    """
    **Feature: glaeser-refinement, Property 8: Refinement Contracts**

    *For any* bundle, one refinement pass SHALL only shrink fibers, and a
    value that lies in every fiber SHALL survive every pass.
    """

    @settings(max_examples=10, deadline=None)
    @given(
        f1=st.floats(min_value=2.0, max_value=4.0),
        f3=st.floats(min_value=-1.0, max_value=0.5),
    )
    def test_pass_is_contracting(self, f1, f3):
        f = (f1, 2.0, f3, 2.0)
        system = build_paper_system(f)
        grid = Grid.square(0.0, 1.0, 5)
        config = RefinementConfig.for_system(system, grid, neighbor_radius=1.5)
        bundle = build_initial_bundle(system, grid)
        refined = refine_once(bundle, config)
        for before, after in zip(bundle.fibers, refined.fibers):
            for vertex in polygon(after, config.window):
                assert contains(before, vertex, 1e-7)

    @settings(max_examples=10, deadline=None)
    @given(f1=st.floats(min_value=2.0, max_value=4.0))
    def test_common_value_survives(self, f1):
        grid, config, _, refined, report = paper_run((f1, 2.0, -1.0, 2.0), resolution=7)
        assert report.verdict == "feasible"
        for fiber in refined.fibers:
            assert contains(fiber, (2.0, 2.0), 1e-9)

    def test_input_bundle_unchanged(self):
        system = build_paper_system(PAPER_WIDE)
        grid = Grid.square(0.0, 1.0, 5)
        config = RefinementConfig.for_system(system, grid, neighbor_radius=1.5)
        bundle = build_initial_bundle(system, grid)
        sizes = [f.size for f in bundle.fibers]
        refine_once(bundle, config)
        assert [f.size for f in bundle.fibers] == sizes


class TestProperty9Stabilization:
    """
    **Feature: glaeser-refinement, Property 9: Stabilization**

    *For any* feasible constant-data run with a neighbor radius spanning the
    domain, refinement SHALL stabilize on the second pass with zero change.
    """

    def test_paper_feasible_stabilizes(self):
        _, _, _, _, report = paper_run(PAPER_FEASIBLE)
        assert report.stabilized
        assert report.verdict == "feasible"
        assert report.iterations_run == 2
        assert report.per_iteration_change[-1] <= 1e-9
        assert report.radii == [1.5, 1.5]

    def test_intro_stabilizes(self):
        system = build_intro_system(lambda t: t)
        grid = Grid((-1.0,), (1.0,), (21,))
        config = RefinementConfig.for_system(system, grid, neighbor_radius=2.0)
        refined, report = refine_to_stable(build_initial_bundle(system, grid), config)
        assert report.verdict == "feasible"
        assert config.epsilon_of_r(1.0) == pytest.approx(5.0)
        for fiber in refined.fibers:
            assert contains(fiber, (1.0,), 1e-9)

    def test_initially_empty_fiber_stops_before_refining(self):
        _, _, _, _, report = paper_run((1.0, 1.0, -2.0, 0.0))
        assert report.verdict == "infeasible"
        assert report.iterations_run == 0
        assert report.empty_nodes

    def test_undetermined_raises(self):
        report = RefinementReport(iterations_run=8)
        assert report.verdict == "undetermined"
        with pytest.raises(NotStabilized):
            report.raise_if_unstable()
        RefinementReport(stabilized=True).raise_if_unstable()

    def test_report_dict(self):
        _, _, _, _, report = paper_run(PAPER_FEASIBLE, resolution=5)
        document = report.to_dict()
        assert document["verdict"] == "feasible"
        assert document["iterations_run"] == 2
        assert len(document["per_iteration_change"]) == 2


class TestProperty10OracleAgreement:
    """
    **Feature: glaeser-refinement, Property 10: Oracle Agreement**

    *For any* constant feasible data, the analytic refined origin fiber SHALL
    be contained in the engine's origin fiber, and a jump in the data SHALL
    empty the fiber at the jump.
    """

    @pytest.mark.parametrize("f", [PAPER_FEASIBLE, PAPER_WIDE, (3.0, 2.5, 0.5, 2.0)])
    def test_analytic_origin_fiber_inside_engine(self, f):
        grid, config, _, refined, report = paper_run(f)
        assert report.verdict == "feasible"
        origin = refined.fibers[grid.index_of((0.0, 0.0))]
        for y in analytic_h1_polygon(f, config.window, n=64):
            assert contains(origin, y, 1e-7)

    def test_jump_toy_empties_origin(self):
        system = sign_system()
        grid = Grid((-1.0,), (1.0,), (21,))
        config = RefinementConfig.for_system(system, grid, kappa=1.0, neighbor_radius=0.5)
        refined, report = refine_to_stable(build_initial_bundle(system, grid), config)
        assert report.verdict == "infeasible"
        assert grid.index_of((0.0,)) in report.empty_nodes

    def test_brute_force_inside_engine(self):
        system = build_paper_system(PAPER_WIDE)
        grid = Grid.square(0.0, 1.0, 4)
        config = RefinementConfig.for_system(system, grid, neighbor_radius=1.5)
        bundle = build_initial_bundle(system, grid)
        engine = refine_once(bundle, config)
        _, distances = neighbor_offsets(grid, 1.5)
        ladder = np.unique(distances)
        brute = brute_force_refine(bundle, list(config.epsilon_of_r(ladder)), list(ladder), config.window, 21)
        for coarse, fine in zip(engine.fibers, brute.fibers):
            for vertex in polygon(fine, config.window):
                assert contains(coarse, vertex, 1e-6)

    def test_brute_force_size_limit(self):
        grid = Grid.square(0.0, 1.0, 34)
        bundle = Bundle.constant(grid, ConvexRegion.box([0, 0], [1, 1]))
        with pytest.raises(TooLarge):
            brute_force_refine(bundle, [0.1], [0.1], Window.square(2.0))


class TestDefaultSchedule:
    """
    Runs with the configuration chosen by for_system: every pass compares
    each node with all other nodes, so the worked scenarios settle.
    """

    def test_paper_feasible_settles(self):
        grid, _, _, report = default_run(PAPER_FEASIBLE, 9)
        assert report.verdict == "feasible"
        assert report.iterations_run == 2
        assert report.per_iteration_change[-1] <= 1e-9
        assert report.radii == pytest.approx([grid.span, grid.span])

    def test_paper_infeasible_stops_at_start(self):
        _, _, _, report = default_run((1.0, 1.0, -2.0, 0.0), 9)
        assert report.verdict == "infeasible"
        assert report.iterations_run == 0

    def test_constant_bundle_settles_in_one_pass(self):
        rows = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
        system = build_custom_system(rows, [1.0, 1.0, 1.0, 1.0], ((0.0, 0.0), (1.0, 1.0)))
        grid = Grid.square(0.0, 1.0, 5)
        bundle = build_initial_bundle(system, grid)
        refined, report = refine_to_stable(bundle, RefinementConfig.for_system(system, grid))
        assert report.verdict == "feasible"
        assert report.iterations_run == 1
        assert report.per_iteration_change == [0.0]
        assert all(a.same_as(b) for a, b in zip(bundle.fibers, refined.fibers))

    def test_intro_settles(self):
        grid, _, _, (refined, report) = intro_run(lambda t: t, 21)
        assert report.verdict == "feasible"
        assert report.iterations_run == 2
        assert report.radii == pytest.approx([2.0, 2.0])
        for fiber in refined.fibers:
            assert contains(fiber, (1.0,), 1e-9)

    def test_ring_schedule_on_request(self):
        system = build_paper_system(PAPER_FEASIBLE)
        grid = Grid.square(0.0, 1.0, 9)
        config = RefinementConfig.for_system(system, grid, ring_start=8.0)
        assert config.neighbor_radius is None
        assert config.radius(1, grid.h) == pytest.approx(4 * grid.h)


INTRO_FAMILY = [
    ("x", lambda t: t, True),
    ("-x", lambda t: -t, False),
    ("x^2", lambda t: t * t, True),
    ("-x^2", lambda t: -t * t, False),
    ("x+x^2", lambda t: t + t * t, True),
    ("zero", lambda t: 0.0, True),
    ("one", lambda t: 1.0, False),
]


class TestIntroFamily:
    """
    The one-dimensional model on a fine grid agrees with its closed-form
    decision for each data function of a small family.
    """

    @pytest.mark.parametrize("f, feasible", [(f, ok) for _, f, ok in INTRO_FAMILY], ids=[n for n, _, _ in INTRO_FAMILY])
    def test_engine_matches_closed_form(self, f, feasible):
        assert intro_1d_feasible(f, domain=(-1.0, 1.0)) is feasible
        _, _, _, (_, report) = intro_run(f, 1025)
        assert report.verdict == ("feasible" if feasible else "infeasible")

    @pytest.mark.parametrize("sign", [1.0, -1.0], ids=["x^2", "-x^2"])
    def test_brute_force_on_squares(self, sign):
        grid, config, bundle, _ = intro_run(lambda t: sign * t * t, 33)
        _, distances = neighbor_offsets(grid, grid.span)
        ladder = np.unique(distances)
        brute = brute_force_refine(bundle, list(config.epsilon_of_r(ladder)), list(ladder), config.window)
        if sign > 0:
            assert brute.empty_nodes() == []
        else:
            assert brute.empty_nodes() == list(range(grid.node_count))


class TestConvergence:
    """Behaviour of the default run as the grid is refined."""

    @pytest.mark.slow
    def test_origin_excess_shrinks_with_resolution(self):
        excess = []
        for resolution in (9, 17, 33):
            grid, config, refined, report = default_run(PAPER_FEASIBLE, resolution)
            assert report.verdict == "feasible"
            origin = polygon(refined.fibers[grid.index_of((0.0, 0.0))], config.window)
            analytic = analytic_h1_polygon(PAPER_FEASIBLE, config.window)
            gap = float(polygon_distances(analytic, origin).max())
            assert gap <= 3.5 * float(config.epsilon_of_r(grid.h))
            excess.append(gap)
        assert excess[0] > excess[1] > excess[2]

    @pytest.mark.slow
    @pytest.mark.parametrize("f", [PAPER_FEASIBLE, PAPER_WIDE])
    def test_two_passes_and_idempotent(self, f):
        grid, config, refined, report = default_run(f, 17)
        assert report.stabilized
        assert report.iterations_run == 2
        assert report.per_iteration_change[1] <= 1e-9
        again = refine_once(refined, config)
        eps = float(config.epsilon_of_r(grid.h))
        for before, after in zip(refined.fibers, again.fibers):
            assert hausdorff_sampled(before, after, config.window, n=64) <= 2.0 * eps


class TestNeighborsAndConfig:
    """Neighbor tables and configuration validation."""

    def test_offsets_sorted_by_distance(self):
        grid = Grid.square(0.0, 1.0, 9)
        offsets, distances = neighbor_offsets(grid, 2 * grid.h)
        assert len(offsets) == 12
        assert np.all(np.diff(distances) >= 0)
        assert not np.any(np.all(offsets == 0, axis=1))

    def test_corner_node_neighbors_clipped(self):
        grid = Grid.square(0.0, 1.0, 5)
        offsets, distances = neighbor_offsets(grid, grid.h * 1.01)
        flat, dists = node_neighbors(grid, offsets, distances, 0)
        assert sorted(flat.tolist()) == [1, 5]
        assert np.allclose(dists, grid.h)

    def test_ring_schedule_halves_to_floor(self):
        config = RefinementConfig(Window.square(1.0))
        assert [config.radius(k, 0.1) for k in range(5)] == pytest.approx([0.8, 0.4, 0.2, 0.1, 0.1])

    def test_epsilon_validation(self):
        with pytest.raises(ValueError):
            RefinementConfig(Window.square(1.0), epsilon_of_r=lambda r: np.asarray(r) + 1.0)
        with pytest.raises(ValueError):
            RefinementConfig(Window.square(1.0), epsilon_of_r=lambda r: -np.asarray(r))
        with pytest.raises(ValueError):
            RefinementConfig(Window.square(1.0), max_iterations=0)
        with pytest.raises(ValueError):
            RefinementConfig(Window.square(1.0), neighbor_radius=0.0)

    def test_kappa_override(self):
        system = build_paper_system(PAPER_FEASIBLE)
        grid = Grid.square(0.0, 1.0, 5)
        assert RefinementConfig.for_system(system, grid).epsilon_of_r == LinearEpsilon(1.0)
        assert RefinementConfig.for_system(system, grid, kappa=3.0).epsilon_of_r(2.0) == pytest.approx(6.0)

    @pytest.mark.slow
    def test_threaded_pass_matches_serial(self):
        system = build_paper_system(PAPER_WIDE)
        grid = Grid.square(0.0, 1.0, 9)
        bundle = build_initial_bundle(system, grid)
        serial = refine_once(bundle, RefinementConfig.for_system(system, grid, neighbor_radius=1.5))
        threaded = refine_once(bundle, RefinementConfig.for_system(system, grid, neighbor_radius=1.5, workers=4))
        assert all(a.same_as(b) for a, b in zip(serial.fibers, threaded.fibers))

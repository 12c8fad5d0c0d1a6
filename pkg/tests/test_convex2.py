"""
Property-based tests for the planar convex-region kernel.

**Feature: glaeser-refinement**
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st, settings, assume

from src.glaeser.convex2 import (
    ConvexRegion,
    HalfPlane,
    Window,
    chebyshev_center,
    contains,
    dilate,
    distance,
    hausdorff_sampled,
    intersect,
    is_empty,
    polygon,
    polygon_area,
    project,
    prune_duplicates,
    steiner_point,
    support,
)
from src.glaeser.errors import DimMismatch, EmptyRegion


WINDOW = Window.square(10.0)

coordinate = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
extent = st.floats(min_value=0.05, max_value=4.0, allow_nan=False)
angle = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)


@st.composite
def boxes(draw):
    x0, y0 = draw(coordinate), draw(coordinate)
    return ConvexRegion.box([x0, y0], [x0 + draw(extent), y0 + draw(extent)])


@st.composite
def halfplane_regions(draw):
    """Random bounded regions: a box cut by a few extra halfplanes through its center."""
    region = draw(boxes())
    center = chebyshev_center(region, WINDOW)
    extra = []
    for phi in draw(st.lists(angle, min_size=0, max_size=4)):
        normal = (math.cos(phi), math.sin(phi))
        extra.append(HalfPlane(normal, float(np.dot(normal, center)) + draw(extent)))
    return intersect(region, ConvexRegion.from_halfplanes(extra))


class TestProperty1HalfplaneNormalization:
    """
    **Feature: glaeser-refinement, Property 1: Halfplane Normalization**

    *For any* nonzero normal, a HalfPlane SHALL store a unit normal and an
    offset describing the same set.
    """

    @settings(max_examples=100)
    @given(nx=coordinate, ny=coordinate, offset=coordinate, px=coordinate, py=coordinate)
    def test_normalized_halfplane_describes_same_set(self, nx, ny, offset, px, py):
        """Membership must not change under normalization."""
        assume(math.hypot(nx, ny) > 1e-3)
        hp = HalfPlane((nx, ny), offset)
        assert math.isclose(math.hypot(*hp.normal), 1.0, rel_tol=1e-12)
        raw = nx * px + ny * py - offset
        assume(abs(raw) > 1e-6)
        assert (hp.evaluate((px, py)) <= 0) == (raw <= 0)

    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError):
            HalfPlane((0.0, 0.0), 1.0)
        with pytest.raises(ValueError):
            ConvexRegion(np.array([[0.0, 0.0]]), np.array([1.0]))


class TestProperty2EmptinessAndMembership:
    """
    **Feature: glaeser-refinement, Property 2: Emptiness and Membership**

    *For any* box, is_empty SHALL be false and its Chebyshev center SHALL be
    contained; *for any* pair of disjoint boxes, their intersection SHALL be
    empty.
    """

    @settings(max_examples=50)
    @given(region=boxes())
    def test_box_is_nonempty_and_contains_center(self, region):
        assert not is_empty(region)
        assert contains(region, chebyshev_center(region, WINDOW), 1e-9)

    @settings(max_examples=50)
    @given(region=boxes(), gap=extent)
    def test_disjoint_boxes_intersect_empty(self, region, gap):
        shifted = region.translated((10.0 + gap, 0.0))
        assert is_empty(intersect(region, shifted))

    def test_full_and_canonical_empty(self):
        assert not is_empty(ConvexRegion.full())
        assert is_empty(ConvexRegion.empty())
        assert is_empty(ConvexRegion.empty(1))
        assert contains(ConvexRegion.full(), (1e9, -1e9))

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError):
            contains(ConvexRegion.full(), (0.0, 0.0), -1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimMismatch):
            intersect(ConvexRegion.interval(0, 1), ConvexRegion.box([0, 0], [1, 1]))


class TestProperty3ProjectionOptimality:
    """
    **Feature: glaeser-refinement, Property 3: Projection Optimality**

    *For any* bounded region and point, project SHALL return a member of the
    region no farther from the point than any sampled member.
    """

    @settings(max_examples=60, deadline=None)
    @given(region=halfplane_regions(), px=coordinate, py=coordinate)
    def test_projection_is_closest_member(self, region, px, py):
        p = np.array([px, py]) * 2.0
        q = project(region, p)
        assert contains(region, q, 1e-7)
        vertices = polygon(region, WINDOW)
        gaps = np.linalg.norm(vertices - p, axis=1)
        assert np.linalg.norm(q - p) <= gaps.min() + 1e-7

    def test_projection_onto_box(self):
        square = ConvexRegion.box([0, 0], [1, 1])
        assert np.allclose(project(square, (2.0, 3.0)), [1.0, 1.0])
        assert np.allclose(project(square, (0.5, -1.0)), [0.5, 0.0])
        assert distance(square, (0.5, 0.5)) == 0.0
        assert math.isclose(distance(square, (4.0, 5.0)), 5.0)

    def test_projection_onto_empty_raises(self):
        with pytest.raises(EmptyRegion):
            project(ConvexRegion.empty(), (0.0, 0.0))
        with pytest.raises(EmptyRegion):
            project(ConvexRegion.empty(1), (0.0,))


class TestProperty4DilationHausdorff:
    """
    **Feature: glaeser-refinement, Property 4: Dilation Distance**

    *For any* bounded region, dilate(K, eps) SHALL contain K and the
    eps-neighborhood of K, and stay within Hausdorff distance eps/sin of K's
    sharpest corner half-angle.
    """

    @settings(max_examples=50, deadline=None)
    @given(region=boxes(), eps=st.floats(min_value=0.0, max_value=1.0))
    def test_dilation_contains_neighborhood(self, region, eps):
        grown = dilate(region, eps)
        for vertex in polygon(region, WINDOW):
            for phi in np.linspace(0, 2 * np.pi, 16, endpoint=False):
                assert contains(grown, vertex + eps * np.array([np.cos(phi), np.sin(phi)]), 1e-9)

    @settings(max_examples=50, deadline=None)
    @given(region=boxes(), eps=st.floats(min_value=0.01, max_value=1.0))
    def test_dilated_box_hausdorff_is_corner_diagonal(self, region, eps):
        d = hausdorff_sampled(dilate(region, eps), region, Window.square(20.0))
        assert math.isclose(d, eps * math.sqrt(2), rel_tol=1e-6, abs_tol=1e-9)

    def test_unit_square_dilation(self):
        square = ConvexRegion.box([0, 0], [1, 1])
        d = hausdorff_sampled(dilate(square, 0.2), square, WINDOW)
        assert math.isclose(d, 0.2 * math.sqrt(2), rel_tol=1e-9)

    def test_negative_eps_rejected(self):
        with pytest.raises(ValueError):
            dilate(ConvexRegion.full(), -0.1)


class TestProperty5SupportAndSteiner:
    """
    **Feature: glaeser-refinement, Property 5: Support and Steiner Point**

    *For any* bounded region, support SHALL equal the maximum over its
    vertices, and the Steiner point SHALL lie in the region and move with
    translations.
    """

    @settings(max_examples=50, deadline=None)
    @given(region=halfplane_regions(), phi=angle)
    def test_support_matches_vertices(self, region, phi):
        u = np.array([math.cos(phi), math.sin(phi)])
        vertices = polygon(region, WINDOW)
        assert math.isclose(support(region, u, WINDOW), float(np.max(vertices @ u)), abs_tol=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(region=halfplane_regions(), dx=coordinate, dy=coordinate)
    def test_steiner_point_inside_and_equivariant(self, region, dx, dy):
        big = Window.square(40.0)
        s = steiner_point(region, big)
        assert contains(region, s, 1e-6)
        moved = steiner_point(region.translated((dx, dy)), big)
        assert np.allclose(moved, s + np.array([dx, dy]), atol=1e-6)

    def test_steiner_point_of_box_is_center(self):
        s = steiner_point(ConvexRegion.box([1, 2], [3, 6]), WINDOW)
        assert np.allclose(s, [2.0, 4.0], atol=1e-9)

    def test_steiner_point_of_interval(self):
        s = steiner_point(ConvexRegion.interval(-1.0, 3.0), Window.square(10.0, 1))
        assert np.allclose(s, [1.0])

    def test_steiner_point_of_empty_raises(self):
        with pytest.raises(EmptyRegion):
            steiner_point(ConvexRegion.empty(), WINDOW)
        with pytest.raises(ValueError):
            steiner_point(ConvexRegion.full(), WINDOW, n_dirs=4)


class TestConstructorsAndViews:
    """Constructors, hulls and bookkeeping helpers."""

    def test_from_vertices_hull(self):
        points = np.array([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]], dtype=float)
        hull = ConvexRegion.from_vertices(points)
        assert contains(hull, (1.0, 1.0))
        assert not contains(hull, (2.5, 1.0), 1e-9)
        assert math.isclose(polygon_area(polygon(hull, WINDOW)), 4.0, rel_tol=1e-9)

    def test_from_vertices_degenerate(self):
        point = ConvexRegion.from_vertices(np.array([[1.0, 2.0]]))
        assert contains(point, (1.0, 2.0), 1e-12)
        segment = ConvexRegion.from_vertices(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
        assert contains(segment, (1.5, 1.5), 1e-9)
        assert not contains(segment, (1.5, 1.0), 1e-6)
        with pytest.raises(EmptyRegion):
            ConvexRegion.from_vertices(np.zeros((0, 2)))

    def test_interval_bounds(self):
        assert ConvexRegion.interval(-1.0, 2.0).bounds == (-1.0, 2.0)
        assert ConvexRegion.full(1).bounds == (-np.inf, np.inf)
        with pytest.raises(DimMismatch):
            _ = ConvexRegion.full().bounds

    def test_prune_keeps_tightest(self):
        a = ConvexRegion.box([0, 0], [2, 2])
        b = ConvexRegion.box([0, 0], [1, 1])
        pruned = prune_duplicates(intersect(a, b))
        assert pruned.size == 4
        assert contains(pruned, (1.0, 1.0)) and not contains(pruned, (1.5, 0.5))
        assert intersect(a, b, prune=True).size == 4

    def test_window_validation(self):
        with pytest.raises(ValueError):
            Window((0.0, 0.0), (0.0, 1.0))
        assert Window.square(1.0).corners().shape == (4, 2)
        assert math.isclose(Window.square(1.0).diameter, 2 * math.sqrt(2))


class TestWorkedExamples:
    """Small hand-checked values of the kernel operations."""

    square = ConvexRegion.box([-1.0, -1.0], [1.0, 1.0])

    def test_membership_with_tolerance(self):
        assert contains(self.square, (0.0, 0.0))
        assert contains(self.square, (1.0 + 1e-9, 0.0), 1e-6)
        assert not contains(self.square, (2.0, 0.0))

    def test_distances(self):
        halfplane = ConvexRegion.from_halfplanes([HalfPlane((-1.0, 0.0), -1.0)])
        assert distance(halfplane, (0.0, 0.0)) == pytest.approx(1.0)
        assert distance(self.square, (2.0, 2.0)) == pytest.approx(math.sqrt(2))

    def test_intersection_of_quadrants_is_box(self):
        upper = ConvexRegion.box([-np.inf, -np.inf], [3.0, 3.0])
        lower = ConvexRegion.box([-2.0, -2.0], [np.inf, np.inf])
        box = intersect(upper, lower)
        assert math.isclose(polygon_area(polygon(box, WINDOW)), 25.0, rel_tol=1e-9)
        assert intersect(box, ConvexRegion.full()).same_as(box)

    def test_support_of_square(self):
        assert support(self.square, (1.0, 0.0), WINDOW) == pytest.approx(1.0)
        diagonal = (1 / math.sqrt(2), 1 / math.sqrt(2))
        assert support(self.square, diagonal, WINDOW) == pytest.approx(math.sqrt(2))

    def test_steiner_point_of_polygonal_disk(self):
        phi = 2 * np.pi * np.arange(64) / 64 + 0.1
        disk = ConvexRegion(np.column_stack([np.cos(phi), np.sin(phi)]), np.ones(64))
        assert np.linalg.norm(steiner_point(disk, WINDOW)) < 1e-3

    def test_sampled_hausdorff(self):
        wider = ConvexRegion.box([-1.0, -1.0], [1.5, 1.0])
        assert hausdorff_sampled(self.square, self.square, WINDOW) == pytest.approx(0.0, abs=1e-9)
        assert hausdorff_sampled(self.square, wider, WINDOW) == pytest.approx(0.5, abs=1e-9)

    def test_repeated_dilation_adds_offsets(self):
        assert np.allclose(dilate(dilate(self.square, 0.1), 0.2).offsets, dilate(self.square, 0.3).offsets)

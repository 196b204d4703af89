import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hh_center.errors import DegenerateBodyError, InputError
from hh_center.geometry import (
    Polygon2,
    Polytope3,
    ProfileBody,
    ball_profile,
    centroid,
    convex_hull_2d,
    fubini_volume,
    orthonormal_frame,
    project_shadow,
    section_measure,
    support_interval,
    unit_direction,
    volume,
)
from hh_center.verify import random_instance

E1 = np.array([1.0, 0.0])
E1_3 = np.array([1.0, 0.0, 0.0])


def random_unit(rng, n):
    u = rng.normal(size=n)
    return u / np.linalg.norm(u)


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


class TestVolumeAndCentroid:
    def test_unit_square(self, unit_square):
        assert volume(unit_square) == pytest.approx(1.0, rel=1e-14)
        assert_allclose(centroid(unit_square), [0.5, 0.5], atol=1e-14)

    def test_standard_triangle(self, standard_triangle):
        assert volume(standard_triangle) == pytest.approx(0.5, rel=1e-14)
        assert_allclose(centroid(standard_triangle), [1 / 3, 1 / 3], atol=1e-14)

    def test_standard_tetrahedron(self, standard_tetrahedron):
        assert volume(standard_tetrahedron) == pytest.approx(1 / 6, rel=1e-12)
        assert_allclose(centroid(standard_tetrahedron), [0.25, 0.25, 0.25], atol=1e-13)

    def test_unit_disc_profile(self, unit_disc):
        assert volume(unit_disc) == pytest.approx(math.pi, rel=1e-6)
        assert_allclose(centroid(unit_disc), [0.0, 0.0], atol=1e-12)


class TestSections:
    def test_unit_square_slab(self, unit_square):
        assert section_measure(unit_square, E1, 0.3) == pytest.approx(1.0, abs=1e-12)

    def test_triangle_chords(self, equality_triangle):
        ts = np.linspace(0.0, 1.0, 11)
        assert_allclose(equality_triangle.section_measures(E1, ts), 1.0 - ts, atol=1e-12)

    def test_outside_support_is_zero(self, equality_triangle):
        assert section_measure(equality_triangle, E1, -0.1) == 0.0
        assert section_measure(equality_triangle, E1, 1.1) == 0.0

    def test_unit_cube(self, unit_cube):
        assert section_measure(unit_cube, E1_3, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_tetrahedron_sections_are_quadratic(self, standard_tetrahedron):
        ts = np.linspace(0.0, 1.0, 9)
        assert_allclose(standard_tetrahedron.section_measures(E1_3, ts), 0.5 * (1 - ts) ** 2, atol=1e-12)

    def test_diagonal_cube_section(self, unit_cube):
        u = np.ones(3) / math.sqrt(3.0)
        # the plane through the center orthogonal to the diagonal cuts a regular hexagon
        assert section_measure(unit_cube, u, math.sqrt(3.0) / 2) == pytest.approx(3 * math.sqrt(3) / 4, rel=1e-12)

    def test_non_unit_direction_rejected(self, unit_square):
        with pytest.raises(InputError):
            section_measure(unit_square, [1.0, 1.0], 0.5)


class TestSupportAndShadow:
    def test_support_intervals(self, unit_square, unit_disc, equality_triangle):
        assert support_interval(unit_square, E1) == (0.0, 1.0)
        assert_allclose(support_interval(unit_disc, E1), (-1.0, 1.0))
        assert support_interval(equality_triangle, E1) == (0.0, 1.0)

    def test_disc_support_in_oblique_direction(self, unit_disc):
        u = np.array([0.6, 0.8])
        assert_allclose(support_interval(unit_disc, u), (-1.0, 1.0), atol=1e-6)

    def test_cube_shadow(self, unit_cube):
        shadow = project_shadow(unit_cube, "xy")
        assert shadow.volume() == pytest.approx(1.0)
        assert_allclose(sorted(map(tuple, shadow.vertices)), [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_tetrahedron_shadow(self, standard_tetrahedron):
        shadow = project_shadow(standard_tetrahedron, "xy")
        assert shadow.volume() == pytest.approx(0.5)
        assert_allclose(sorted(map(tuple, shadow.vertices)), [(0, 0), (0, 1), (1, 0)])

    def test_prism_shadow(self, prism_cone):
        shadow = project_shadow(prism_cone, "xy")
        assert_allclose(sorted(map(tuple, shadow.vertices)), [(0, -0.5), (0, 0.5), (1, 0)])

    def test_invalid_plane_rejected(self, standard_tetrahedron):
        with pytest.raises(InputError):
            project_shadow(standard_tetrahedron, (0, 0))
        with pytest.raises(InputError):
            project_shadow(standard_tetrahedron, "xx")


class TestValidation:
    def test_clockwise_polygon_rejected(self):
        with pytest.raises(InputError):
            Polygon2([[0, 0], [0, 1], [1, 1], [1, 0]])

    def test_non_convex_polygon_rejected(self):
        with pytest.raises(InputError):
            Polygon2([[0, 0], [2, 0], [1, 0.5], [2, 2], [0, 2]])

    def test_collinear_vertices_dropped(self):
        p = Polygon2([[0, 0], [0.5, 0], [1, 0], [1, 1], [0, 1], [0, 1]])
        assert len(p.vertices) == 4

    def test_degenerate_polygon(self):
        with pytest.raises(DegenerateBodyError):
            Polygon2([[0, 0], [1, 1], [2, 2]])

    def test_flat_polytope(self):
        with pytest.raises(DegenerateBodyError):
            Polytope3([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])

    def test_unit_direction(self):
        with pytest.raises(InputError):
            unit_direction([0.0, 0.0, 1.0], 2)


def test_orthonormal_frame_first_axis():
    rng = np.random.default_rng(7)
    for n in (2, 3, 5):
        u = random_unit(rng, n)
        q = orthonormal_frame(u)
        assert_allclose(q[:, 0], u, atol=1e-15)
        assert_allclose(q.T @ q, np.eye(n), atol=1e-12)


def test_hull_drops_interior_points():
    pts = [[0, 0], [2, 0], [2, 2], [0, 2], [1, 1], [1, 0]]
    hull = convex_hull_2d(pts)
    assert len(hull) == 4


def test_clip_polygon_halves_square(unit_square):
    half = unit_square.clip([1.0, 0.0], 0.5)
    assert half.volume() == pytest.approx(0.5)
    assert unit_square.clip([1.0, 0.0], -1.0) is None


def test_clip_polytope_corner(unit_cube):
    corner = unit_cube.clip([1.0, 1.0, 1.0], 1.0)
    assert corner.volume() == pytest.approx(1 / 6, rel=1e-12)


@pytest.mark.parametrize("u", [[0.6, 0.8], [0.0, 1.0], [-0.8, -0.6]])
def test_disc_oblique_chords(unit_disc, u):
    ts = np.array([-0.9, -0.3, 0.0, 0.5, 0.9])
    assert_allclose(unit_disc.section_measures(u, ts), 2 * np.sqrt(1 - ts**2), atol=1e-6)
    lo, hi = unit_disc.chord_ends(u, ts)
    plo, phi = unit_disc.as_polygon().chord_ends(u, ts)
    assert_allclose(lo, plo, atol=1e-8)
    assert_allclose(hi, phi, atol=1e-8)
    assert unit_disc.section_measure(u, 1.5) == 0.0


def test_disc_oblique_breakpoints_match_polygon(unit_disc):
    u = np.array([0.6, 0.8])
    polygon = unit_disc.as_polygon()
    assert polygon.volume() == pytest.approx(unit_disc.volume(), rel=1e-10)
    assert unit_disc.breakpoints(u)[0] == pytest.approx(polygon.breakpoints(u)[0], abs=1e-12)
    assert unit_disc.breakpoints(u)[-1] == pytest.approx(polygon.breakpoints(u)[-1], abs=1e-12)


def test_spatial_profile_body_rejects_oblique_sections():
    ball = ProfileBody(ball_profile(3, knot_count=257))
    assert ball.slices_along([1.0, 0.0, 0.0])
    assert not ball.slices_along([0.6, 0.8, 0.0])
    with pytest.raises(InputError):
        ball.section_measure([0.6, 0.8, 0.0], 0.0)


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_fubini_consistency(seed, n):
    body, _ = random_instance(seed, n)
    u = random_unit(np.random.default_rng(seed), n)
    assert fubini_volume(body, u) == pytest.approx(body.volume(), rel=1e-7)


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_brunn_concavity(seed, n):
    body, _ = random_instance(seed, n)
    rng = np.random.default_rng(seed + 1)
    u = random_unit(rng, n)
    t0, t1 = body.support_interval(u)
    a, b = np.sort(rng.uniform(t0, t1, size=2))
    ts = np.array([a, 0.5 * (a + b), b])
    root = body.section_measures(u, ts) ** (1.0 / (n - 1))
    assert root[1] >= 0.5 * (root[0] + root[2]) - 1e-9


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_centroid_inside(seed, n):
    body, _ = random_instance(seed, n)
    assert body.contains(body.centroid())


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_volume_rigid_motion_invariance(seed, n):
    body, _ = random_instance(seed, n)
    rng = np.random.default_rng(seed)
    moved = body.transformed(random_rotation(rng, n), rng.uniform(-3, 3, size=n))
    assert moved.volume() == pytest.approx(body.volume(), rel=1e-10)

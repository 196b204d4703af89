
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hh_center.center import (
    Affine,
    MinAffine,
    check_nonnegative,
    find_center,
    maximize_on_slice,
    function_scale,
    minimum_on_body,
    supporting_affine,
)
from hh_center.errors import InputError, NegativeFunctionError
from hh_center.geometry import Polygon2, ProfileBody, ball_profile
from hh_center.verify import random_instance

from conftest import SQRT2


def tent():
    return MinAffine((Affine([-1.0, 0.0], 1.0), Affine([1.0, 0.0], 1.0)))


@pytest.fixture
def big_square():
    return Polygon2([[-1, -1], [1, -1], [1, 1], [-1, 1]])


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


class TestFunctions:
    def test_min_affine_evaluation(self):
        f = tent()
        assert f([0.5, 3.0]) == pytest.approx(0.5)
        assert_allclose(f(np.array([[-0.5, 0], [0, 0]])), [0.5, 1.0])
        assert list(f.active_pieces([0.0, 0.0])) == [0, 1]

    def test_duplicates_dropped(self):
        f = MinAffine((Affine([1.0, 0.0], 0.0), Affine([1.0, 0.0], 0.0), Affine([0.0, 1.0], 0.0)))
        assert len(f.pieces) == 2

    def test_mismatched_dimensions(self):
        with pytest.raises(InputError):
            MinAffine((Affine([1.0, 0.0], 0.0), Affine([1.0, 0.0, 0.0], 0.0)))

    def test_minimum_on_body(self, big_square):
        assert minimum_on_body(big_square, tent()) == pytest.approx(0.0)

    def test_negative_function_rejected(self, unit_square):
        with pytest.raises(NegativeFunctionError):
            check_nonnegative(unit_square, Affine([1.0, 0.0], -0.5))

    def test_rounding_tolerance_scales_with_function(self, unit_square):
        steep = Affine([1e3, 0.0], -1e-9)
        assert function_scale(unit_square, steep) == pytest.approx(1e3 * SQRT2 + 1e-9)
        check_nonnegative(unit_square, steep)
        with pytest.raises(NegativeFunctionError):
            check_nonnegative(unit_square, Affine([1.0, 0.0], -1e-6))

    def test_dimension_mismatch_rejected(self, unit_square):
        with pytest.raises(InputError):
            check_nonnegative(unit_square, Affine([1.0, 0.0, 0.0], 1.0))


class TestSupportingAffine:
    def test_affine_supports_itself(self, unit_square):
        g = supporting_affine(unit_square, Affine([1.0, 2.0], 0.5), [0.2, 0.2])
        assert_allclose(g.gradient, [1.0, 2.0])
        assert g.offset == 0.5

    def test_tent_picks_active_piece(self, big_square):
        g = supporting_affine(big_square, tent(), [0.5, 0.0])
        assert_allclose(g.gradient, [-1.0, 0.0])
        assert g.piece == 0
        g = supporting_affine(big_square, tent(), [-0.5, 0.3])
        assert_allclose(g.gradient, [1.0, 0.0])
        assert g.piece == 1

    def test_tie_takes_lowest_index(self, big_square):
        g = supporting_affine(big_square, tent(), [0.0, 0.0])
        assert g.piece == 0
        assert g([0.0, 0.0]) == pytest.approx(1.0)

    def test_start_point_outside(self, big_square):
        with pytest.raises(InputError):
            supporting_affine(big_square, tent(), [2.0, 0.0])


class TestSliceMaximizer:
    def test_segment_unique_maximum(self, unit_square):
        f = MinAffine((Affine([0.0, 1.0], 0.0), Affine([0.0, -1.0], 1.0)))
        point, tie = maximize_on_slice(unit_square, f, [1.0, 0.0], 0.3)
        assert_allclose(point, [0.3, 0.5], atol=1e-12)
        assert not tie

    def test_segment_tie_takes_midpoint(self, unit_square):
        point, tie = maximize_on_slice(unit_square, Affine([1.0, 0.0], 0.0), [1.0, 0.0], 0.3)
        assert_allclose(point, [0.3, 0.5], atol=1e-12)
        assert tie

    def test_polygon_slice_apex(self, unit_cube):
        f = MinAffine(
            (
                Affine([0, 1, 0], 0.0),
                Affine([0, -1, 0], 1.0),
                Affine([0, 0, 1], 0.0),
                Affine([0, 0, -1], 1.0),
            )
        )
        point, tie = maximize_on_slice(unit_cube, f, [1.0, 0.0, 0.0], 0.5)
        assert_allclose(point, [0.5, 0.5, 0.5], atol=1e-10)
        assert not tie

    def test_polygon_slice_edge_tie(self, unit_cube):
        point, tie = maximize_on_slice(unit_cube, Affine([0, 1, 0], 0.0), [1.0, 0.0, 0.0], 0.5)
        assert_allclose(point, [0.5, 1.0, 0.5], atol=1e-10)
        assert tie

    def test_ball_slice(self, unit_disc):
        point, tie = maximize_on_slice(unit_disc, Affine([0.0, 1.0], 2.0), [1.0, 0.0], 0.0)
        assert_allclose(point, [0.0, 1.0], atol=1e-7)
        assert not tie


class TestFindCenter:
    def test_equality_triangle(self, equality_triangle):
        result = find_center(equality_triangle, Affine([1.0, 0.0], 0.0))
        assert_allclose(result.point, [1 - 1 / SQRT2, 0.0], atol=1e-12)
        assert result.f_at_center == pytest.approx(1 - 1 / SQRT2, rel=1e-12)
        assert result.cone.m == pytest.approx(-0.5)
        assert result.tie_broken

    def test_square(self, unit_square):
        result = find_center(unit_square, Affine([1.0, 0.0], 0.0))
        assert_allclose(result.point, [0.5, 0.5], atol=1e-12)
        assert result.f_at_center == pytest.approx(0.5)

    def test_disc(self, unit_disc):
        result = find_center(unit_disc, Affine([1.0, 0.0], 1.0))
        assert_allclose(result.point, [0.0, 0.0], atol=1e-8)
        assert result.f_at_center == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("gradient", [[0.0, 1.0], [0.6, 0.8], [-0.8, 0.6]])
    def test_disc_across_axis(self, unit_disc, gradient):
        result = find_center(unit_disc, Affine(gradient, 1.0))
        assert_allclose(result.direction, gradient, atol=1e-12)
        assert_allclose(result.point, [0.0, 0.0], atol=1e-6)
        assert result.f_at_center == pytest.approx(1.0, abs=1e-6)
        assert result.tie_broken

    def test_spatial_profile_body_needs_axial_function(self):
        ball = ProfileBody(ball_profile(3, knot_count=257))
        with pytest.raises(InputError, match="axis"):
            find_center(ball, Affine([0.0, 1.0, 0.0], 1.0))
        result = find_center(ball, Affine([1.0, 0.0, 0.0], 1.0), knot_count=257)
        assert_allclose(result.point[1:], 0.0, atol=1e-15)
        assert result.f_at_center == pytest.approx(1.0 + result.point[0])

    def test_constant_function_uses_first_axis(self, unit_square):
        result = find_center(unit_square, Affine([0.0, 0.0], 1.0))
        assert_allclose(result.direction, [1.0, 0.0])
        assert_allclose(result.point, [0.5, 0.5], atol=1e-12)

    def test_start_point_outside(self, unit_square):
        with pytest.raises(InputError):
            find_center(unit_square, Affine([1.0, 0.0], 0.0), x0=[2.0, 2.0])

    def test_negative_function(self, unit_square):
        with pytest.raises(NegativeFunctionError):
            find_center(unit_square, Affine([1.0, 0.0], -0.5))

    def test_affine_ignores_start_point(self, standard_triangle):
        f = Affine([1.0, 1.0], 0.2)
        a = find_center(standard_triangle, f)
        b = find_center(standard_triangle, f, x0=[0.1, 0.1])
        assert_allclose(a.point, b.point, atol=1e-14)

    def test_start_points_with_same_piece_agree(self, big_square):
        a = find_center(big_square, tent(), x0=[0.2, 0.0])
        b = find_center(big_square, tent(), x0=[0.7, -0.4])
        assert a.support.piece == b.support.piece == 0
        assert_allclose(a.point, b.point, atol=1e-14)

    def test_to_dict(self, unit_square):
        data = find_center(unit_square, Affine([1.0, 0.0], 0.0)).to_dict()
        assert set(data) == {"point", "direction", "t_value", "f0", "cone", "diagnostics"}
        assert data["diagnostics"]["supporting_piece"] == 0
        assert data["t_value"] == pytest.approx(0.5)


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_center_lies_in_body_and_below_support(seed, n):
    body, f = random_instance(seed, n)
    result = find_center(body, f, knot_count=257)
    assert body.contains(result.point, tol=1e-9)
    vertices = body.vertices
    assert np.all(result.support(vertices) >= f(vertices) - 1e-12)
    assert result.f_at_center >= -1e-12
    assert result.f_at_center == pytest.approx(float(f(result.point)))


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_center_moves_with_rigid_motions(seed, n):
    body, f = random_instance(seed, n)
    rng = np.random.default_rng(seed)
    rotation = random_rotation(rng, n)
    shift = rng.uniform(-2.0, 2.0, size=n)
    moved = find_center(body.transformed(rotation, shift), f.composed(rotation, shift), knot_count=257)
    base = find_center(body, f, knot_count=257)
    assert_allclose(moved.point, rotation @ base.point + shift, atol=1e-6)
    assert moved.f_at_center == pytest.approx(base.f_at_center, abs=1e-7)

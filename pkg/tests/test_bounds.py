import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hh_center.bounds import (
    BoundReport,
    ExpMinusOne,
    ExpSquareMinusOne,
    PiecewiseLinearConvex,
    Power,
    cone_objective,
    conjecture_bound,
    erfi,
    evaluate_bound,
    golden_section_max,
    make_gauge,
    params_2d,
    params_3d,
    power_bound_2d,
    reduced_bound,
    slope_trace,
)
from hh_center.conesolver import max_slope
from hh_center.errors import InputError, InvalidGaugeError, OutOfRangeError

from conftest import CONJECTURE_3D, SQRT2, TRIANGLE_CONSTANT

GAUGES = [Power(1.0), Power(2.0), ExpMinusOne(), ExpSquareMinusOne()]


class TestErfi:
    def test_known_values(self):
        assert erfi(1.0) == pytest.approx(1.650425759, abs=1e-8)
        assert erfi(2.0) == pytest.approx(18.56480241, abs=1e-7)
        assert erfi(0.0) == 0.0

    @pytest.mark.parametrize("x", [1e-3, 0.05, 0.1])
    def test_maclaurin_series(self, x):
        series = x + x**3 / 3 + x**5 / 10 + x**7 / 42 + x**9 / 216
        assert erfi(x) == pytest.approx(2 / math.sqrt(math.pi) * series, rel=1e-12)

    @pytest.mark.parametrize("x", [-0.1, 8.5])
    def test_out_of_range(self, x):
        with pytest.raises(OutOfRangeError):
            erfi(x)


class TestGauges:
    def test_power_rejects_small_exponent(self):
        with pytest.raises(OutOfRangeError):
            Power(0.5)

    def test_strict_convexity(self):
        assert not Power(1.0).strictly_convex
        assert Power(1.5).strictly_convex
        assert not PiecewiseLinearConvex().strictly_convex

    def test_piecewise_linear_extrapolates(self):
        phi = PiecewiseLinearConvex(((0, 0), (1, 1), (2, 3)))
        assert phi(np.array([0.5, 1.5, 3.0])).tolist() == pytest.approx([0.5, 2.0, 5.0])
        assert phi.kinks().tolist() == [1.0, 2.0]
        phi.validate()

    @pytest.mark.parametrize(
        "knots",
        [
            ((0, 0), (1, 1), (2, 1.5)),
            ((0, 1), (1, 2)),
            ((0, 0), (0, 1)),
            ((0, 0), (1, -1)),
        ],
    )
    def test_piecewise_linear_rejects_bad_knots(self, knots):
        with pytest.raises(InvalidGaugeError):
            PiecewiseLinearConvex(knots)

    def test_builtin_gauges_validate(self):
        for phi in GAUGES:
            phi.validate()

    def test_make_gauge(self):
        assert make_gauge("power", 2.0) == Power(2.0)
        assert make_gauge("power") == Power(1.0)
        assert isinstance(make_gauge("exp-square"), ExpSquareMinusOne)
        assert isinstance(make_gauge("pwl", knots=[[0, 0], [1, 2]]), PiecewiseLinearConvex)
        with pytest.raises(InputError):
            make_gauge("exp", 2.0)
        with pytest.raises(InputError):
            make_gauge("pwl")
        with pytest.raises(InputError):
            make_gauge("cosh")


class TestParameters:
    def test_params_2d(self):
        assert params_2d(1.0, 0.0) == pytest.approx((0.5, 0.5))
        assert params_2d(1.0, -1.0) == pytest.approx((1.0, 1 - 1 / SQRT2))
        assert params_2d(1.0, 1.0) == pytest.approx((0.0, 1 / SQRT2))
        with pytest.raises(OutOfRangeError):
            params_2d(1.0, 1.5)

    def test_params_2d_near_zero_slope(self):
        _, t = params_2d(1.0, 1e-12)
        assert t == pytest.approx(0.5, abs=1e-11)

    def test_params_3d(self):
        r, t = params_3d(math.pi / 3, -1.0)
        assert r == pytest.approx(1.0)
        assert t == pytest.approx(1 - 2 ** (-1 / 3))


class TestClosedForms:
    def test_power_bound_2d(self):
        assert power_bound_2d(1.0, 1.0, 1.0) == pytest.approx(TRIANGLE_CONSTANT)
        assert power_bound_2d(2.0, 1.0, 1.0) == pytest.approx(1 + 2 * SQRT2 / 3)
        assert power_bound_2d(1.0, 1.0, 0.0) == 0.0
        with pytest.raises(OutOfRangeError):
            power_bound_2d(0.9, 1.0, 1.0)

    def test_conjecture_bound(self):
        assert conjecture_bound(2, 1.0, Power(1.0)) == pytest.approx(TRIANGLE_CONSTANT, rel=1e-12)
        assert conjecture_bound(3, 1.0, Power(1.0)) == pytest.approx(CONJECTURE_3D, rel=1e-12)
        assert CONJECTURE_3D == pytest.approx(2 ** (1 / 3) / (4 * (2 ** (1 / 3) - 1)), rel=1e-15)
        assert CONJECTURE_3D == pytest.approx(1.2118312, abs=1e-6)


class TestReducedBound:
    def test_planar_linear_gauge(self):
        report = reduced_bound(2, 1.0, 1.0, Power(1.0))
        assert report.bound == pytest.approx(TRIANGLE_CONSTANT, rel=1e-10)
        assert report.argmax_m == pytest.approx(-1.0, abs=1e-8)
        assert report.t_m == pytest.approx(1 - 1 / SQRT2)
        assert report.method == "generic"

    @pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0, 3.0, 5.0])
    def test_matches_planar_closed_form(self, alpha):
        report = reduced_bound(2, 1.0, 1.0, Power(alpha))
        assert report.bound == pytest.approx(power_bound_2d(alpha, 1.0, 1.0), rel=1e-8)
        assert report.argmax_m == pytest.approx(-report.m0, abs=1e-6 * report.m0)

    def test_spatial_linear_gauge(self):
        report = reduced_bound(3, math.pi / 3, 1.0, Power(1.0))
        assert report.bound / report.c == pytest.approx(CONJECTURE_3D, abs=1e-6)
        assert report.argmax_m == pytest.approx(-1.0, abs=1e-6)

    @pytest.mark.parametrize("c", [0.5, 1.0, math.pi / 3, 4.0])
    def test_spatial_linear_gauge_closes_cone(self, c):
        # F is flat to rounding near -m0; the closing cone must still win
        report = reduced_bound(3, c, 1.0, Power(1.0))
        assert report.argmax_m == pytest.approx(-report.m0, abs=1e-6 * report.m0)
        r, t = params_3d(c, -report.m0)
        assert report.r_m == pytest.approx(r, rel=1e-9)
        assert report.t_m == pytest.approx(t, rel=1e-9)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("phi", GAUGES, ids=lambda phi: phi.label())
    def test_conjecture_consistency(self, n, phi):
        report = reduced_bound(n, 1.0, 1.0, phi)
        assert report.bound == pytest.approx(conjecture_bound(n, 1.0, phi), rel=1e-7)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("alpha", [1.0, 2.5])
    def test_scaling_law(self, n, alpha):
        unit = reduced_bound(n, 1.0, 1.0, Power(alpha)).bound
        scaled = reduced_bound(n, 2.5, 0.7, Power(alpha)).bound
        assert scaled == pytest.approx(2.5 * 0.7**alpha * unit, rel=1e-9)

    def test_zero_value_at_center(self):
        report = reduced_bound(2, 1.0, 0.0, ExpMinusOne())
        assert report.bound == 0.0
        assert report.argmax_m == pytest.approx(-1.0)

    def test_piecewise_linear_gauge_dominates_closing_cone(self):
        phi = PiecewiseLinearConvex(((0, 0), (1, 0.5), (2, 2), (4, 8)))
        report = reduced_bound(2, 1.0, 1.0, phi)
        assert report.bound >= conjecture_bound(2, 1.0, phi) * (1 - 1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(InputError):
            reduced_bound(1, 1.0, 1.0, Power(1.0))
        with pytest.raises(InputError):
            reduced_bound(2, 0.0, 1.0, Power(1.0))
        with pytest.raises(InputError):
            reduced_bound(2, 1.0, -1.0, Power(1.0))

    @given(st.floats(0.0, 2.0), st.floats(0.0, 2.0))
    def test_monotone_in_center_value(self, a, b):
        lo, hi = sorted((a, b))
        phi = Power(2.0)
        assert reduced_bound(2, 1.0, lo, phi).bound <= reduced_bound(2, 1.0, hi, phi).bound * (1 + 1e-12)


class TestEvaluateBound:
    def test_methods_agree_for_linear_gauge(self):
        generic = evaluate_bound(2, 0.5, 1 - 1 / SQRT2, Power(1.0))
        closed = evaluate_bound(2, 0.5, 1 - 1 / SQRT2, Power(1.0), "closed-form-2d")
        conj = evaluate_bound(2, 0.5, 1 - 1 / SQRT2, Power(1.0), "conjecture")
        assert generic.bound == pytest.approx(1 / 6, rel=1e-10)
        assert closed.bound == pytest.approx(1 / 6, rel=1e-12)
        assert conj.bound == pytest.approx(1 / 6, rel=1e-12)
        assert closed.method == "closed-form-2d"

    def test_spatial_closed_form(self):
        closed = evaluate_bound(3, math.pi / 3, 1.0, Power(1.0), "closed-form-3d")
        generic = evaluate_bound(3, math.pi / 3, 1.0, Power(1.0))
        assert closed.bound == pytest.approx(math.pi / 3 * CONJECTURE_3D, rel=1e-12)
        assert generic.bound == pytest.approx(closed.bound, rel=1e-7)

    @pytest.mark.parametrize(
        "n, phi, method",
        [
            (3, Power(1.0), "closed-form-2d"),
            (2, ExpMinusOne(), "closed-form-2d"),
            (2, Power(1.0), "closed-form-3d"),
            (3, Power(2.0), "closed-form-3d"),
            (2, Power(1.0), "newton"),
        ],
    )
    def test_inapplicable_method(self, n, phi, method):
        with pytest.raises(InputError):
            evaluate_bound(n, 1.0, 1.0, phi, method)

    def test_per_unit_volume(self):
        report = evaluate_bound(2, 0.5, 1 - 1 / SQRT2, Power(1.0), "closed-form-2d").per_unit_volume()
        assert report.per_volume
        assert report.bound == pytest.approx(1 / 3, rel=1e-12)
        assert report.per_unit_volume() is report
        data = report.to_dict()
        assert data["gauge"] == {"type": "power", "alpha": 1.0}
        assert isinstance(report, BoundReport)


class TestOptimizer:
    def test_golden_section_max(self):
        m, value = golden_section_max(lambda x: -((x - 0.3) ** 2), 0.0, 1.0, 1e-10)
        assert m == pytest.approx(0.3, abs=1e-8)
        assert value == pytest.approx(0.0, abs=1e-15)

    def test_slope_trace(self):
        rows = slope_trace(2, 1.0, 1.0, Power(1.0), count=9)
        assert len(rows) == 9
        assert rows[0]["m"] == pytest.approx(-max_slope(2, 1.0))
        assert rows[0]["F"] == pytest.approx(TRIANGLE_CONSTANT, rel=1e-12)
        assert rows[4]["t_m"] == pytest.approx(0.5)
        assert rows[4]["F"] == pytest.approx(cone_objective(2, 1.0, 1.0, Power(1.0), 0.0))
        assert max(row["F"] for row in rows) == rows[0]["F"]

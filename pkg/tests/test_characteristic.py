import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jensen_gap import (CharacteristicEstimate, DegenerateError, FunctionHandle, GridConfig,
                        Interval, Kind, characteristic_closed_form, characteristic_numeric,
                        characteristic_oracle_power, parse_function)
from jensen_gap.characteristic import power_characteristic

EXPONENTS = [0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 5.0]


def brute_force_power(s, n=200_001):
    """Dense-grid maximum of (q - q^s) / (1 - 2^(1-s)) over [0, 1]."""
    q = np.linspace(0.0, 1.0, n)
    return float(np.max((q - q ** s) / (1.0 - 2.0 ** (1.0 - s))))


class TestClosedForm:
    @pytest.mark.parametrize("s", EXPONENTS)
    def test_matches_golden_oracle(self, s):
        c = characteristic_closed_form(FunctionHandle.pow(s)).value
        assert abs(c - characteristic_oracle_power(s)) <= 1e-9

    @pytest.mark.parametrize("s", EXPONENTS)
    def test_matches_dense_grid(self, s):
        c = power_characteristic(s)
        approx = brute_force_power(s)
        assert approx <= c + 1e-12
        assert c - approx < 1e-8

    def test_square_is_half(self):
        assert abs(power_characteristic(2.0) - 0.5) <= 1e-12

    def test_x_log_x(self):
        est = characteristic_closed_form(FunctionHandle(Kind.X_LOG_X))
        assert abs(est.value - 1 / (math.e * math.log(2))) <= 1e-12
        assert math.isclose(est.value, 0.530737845423043, rel_tol=1e-13)

    def test_square_root(self):
        # (1 - 1/2) (1/2)^1 / (sqrt(2) - 1)
        assert math.isclose(power_characteristic(0.5), 0.25 / (math.sqrt(2) - 1), rel_tol=1e-14)

    @pytest.mark.parametrize("s", [-0.5, -1.0, -3.0])
    def test_negative_exponent_is_one(self, s):
        assert characteristic_closed_form(FunctionHandle.pow(s)).value == 1.0

    @pytest.mark.parametrize("s", [0.0, 1.0])
    def test_affine_exponents_degenerate(self, s):
        with pytest.raises(DegenerateError):
            characteristic_closed_form(FunctionHandle.pow(s))

    def test_affine_degenerate(self):
        with pytest.raises(DegenerateError):
            characteristic_closed_form(FunctionHandle.affine(0, 1))

    def test_declared_variation(self):
        est = characteristic_closed_form(parse_function("exp@rapid"))
        assert (est.value, est.method) == (1.0, "declared_variation")

    def test_unknown_kind(self):
        assert characteristic_closed_form(FunctionHandle(Kind.LOGIT)) is None

    def test_scale_invariant(self):
        for alpha in (0.5, -3.0):
            assert (characteristic_closed_form(FunctionHandle.pow(3).scaled(alpha)).value
                    == power_characteristic(3.0))

    def test_continuous_through_two(self):
        for d in (1e-4, 1e-6):
            assert abs(power_characteristic(2 + d) - 0.5) < 10 * d
            assert abs(power_characteristic(2 - d) - 0.5) < 10 * d

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 20.0).filter(lambda s: abs(s - 1) > 1e-3))
    def test_in_unit_half_range(self, s):
        c = power_characteristic(s)
        assert 0.5 - 1e-12 <= c <= 1.0 + 1e-12


class TestNumeric:
    @pytest.mark.parametrize("spec, window", [
        ("pow:2", Interval(0.1, 10)),
        ("xlogx", Interval(0.01, 100)),
        ("pow:0.5", Interval(0.0, 10)),
        ("pow:3", Interval(0.1, 10)),
    ])
    def test_lower_estimate_close_to_closed_form(self, spec, window):
        f = parse_function(spec)
        exact = characteristic_closed_form(f).value
        est = characteristic_numeric(f, window)
        assert est.method == "numeric"
        assert est.value <= exact + 1e-6
        assert exact - est.value <= 1e-3

    def test_concave_power_needs_ratio_near_zero(self):
        # for s < 1 the supremum is approached only as a/b -> 0
        f = FunctionHandle.pow(0.5)
        exact = power_characteristic(0.5)
        assert exact - characteristic_numeric(f, Interval(0.01, 100)).value > 1e-3
        assert exact - characteristic_numeric(f, Interval(0.0, 1)).value < 1e-6

    def test_argmax_within_window(self):
        w = Interval(0.1, 10)
        est = characteristic_numeric(FunctionHandle.pow(3), w)
        p, a, b = est.argmax
        assert 0 < p < 1 and w.lo <= a < b <= w.hi

    def test_deterministic(self):
        f, w = FunctionHandle(Kind.X_LOG_X), Interval(0.1, 5)
        assert characteristic_numeric(f, w) == characteristic_numeric(f, w)

    def test_more_rounds_never_worse(self):
        f, w = FunctionHandle.pow(0.5), Interval(0.1, 10)
        coarse = characteristic_numeric(f, w, GridConfig(rounds=0))
        fine = characteristic_numeric(f, w, GridConfig(rounds=4))
        assert fine.value >= coarse.value

    def test_logit_has_no_closed_form_but_numeric_works(self):
        est = characteristic_numeric(FunctionHandle(Kind.LOGIT), Interval(0.05, 0.45))
        assert math.isfinite(est.value) and est.value > 0

    def test_affine_degenerate(self):
        with pytest.raises(DegenerateError):
            characteristic_numeric(FunctionHandle.affine(1, 2), Interval(0, 1))

    def test_degenerate_window(self):
        with pytest.raises(DegenerateError):
            characteristic_numeric(FunctionHandle.pow(2), Interval(1, 1))

    def test_round_trip(self):
        est = characteristic_numeric(FunctionHandle.pow(2), Interval(0.1, 10))
        assert CharacteristicEstimate.from_dict(est.to_dict()) == est

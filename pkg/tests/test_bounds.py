import json
import math

import numpy as np
import pytest

from jensen_gap import (CharacteristicEstimate, FunctionHandle, Interval, JensenBoundReport,
                        Kind, MercerBoundReport, PreconditionError, WeightedSample,
                        jensen_bounds, mercer_bounds)
from jensen_gap.bounds import tolerance

from conftest import CONVEX_CATALOG, catalog_id, random_sample

EXP = FunctionHandle(Kind.EXP)
LOGIT = FunctionHandle(Kind.LOGIT)
SQUARE = FunctionHandle.pow(2)
E = math.e
RT_E = math.sqrt(math.e)


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


@pytest.fixture(scope="module")
def report():
    return jensen_bounds(WeightedSample.uniform([0.0, 1.0]), Interval(0, 1), EXP)


class TestExpSpotValues:
    """x = (0, 1), equal weights, f = exp on [0, 1]: every quantity is closed-form."""

    def test_exact_expressions(self, report):
        B = 1 + E - 2 * RT_E
        assert close(report.value, (1 + E) / 2 - RT_E)
        assert close(report.B, B)
        assert close(report.Q, 0.25)
        assert close(report.global_upper.value, B)
        assert close(report.sharpened_upper.value, B)  # c(exp) = 1
        assert close(report.sandwich_lower.value, 0.125)
        assert close(report.sandwich_upper.value, E / 8)
        assert close(report.converse_lower.value, B - E / 8)
        assert close(report.converse_upper.value, B - 0.125)
        assert close(report.twosided_lower.value, B / (1 + E))
        assert close(report.twosided_upper.value, E * B / (1 + E))
        assert close(report.corollary_upper.value, E * B / (1 + E))

    def test_frozen_values(self, report):
        assert close(report.value, 0.21041964352939435, 1e-15)
        assert close(report.converse_lower.value, 0.08105405850140807, 1e-15)
        assert close(report.twosided_lower.value, 0.11318111602992602, 1e-15)

    def test_printed_digits(self, report):
        printed = {"value": 0.210421, "global_upper": 0.420842, "sandwich_lower": 0.125,
                   "sandwich_upper": 0.339785, "converse_lower": 0.081056,
                   "converse_upper": 0.295842, "twosided_lower": 0.113182,
                   "twosided_upper": 0.307660}
        for key, want in printed.items():
            got = report.value if key == "value" else getattr(report, key).value
            assert abs(got - want) <= 5e-6, key

    def test_no_violations(self, report):
        assert report.violations() == []
        assert report.warnings == ()


class TestQuadratic:
    def test_sandwich_is_equality(self, rng):
        for _ in range(200):
            s = random_sample(rng, Interval(0, 3))
            r = jensen_bounds(s, Interval(0, 3), SQUARE)
            assert r.sandwich_lower.value == r.sandwich_upper.value
            assert close(r.value, r.sandwich_lower.value, 1e-12)

    def test_mercer_example(self):
        r = mercer_bounds(WeightedSample([0.5], [1.0]), Interval(0, 1), SQUARE)
        assert r.value == 0.5
        assert r.global_upper.value == 1.0
        assert r.sharpened_upper.value == 0.75
        assert r.sandwich_lower.value == r.sandwich_upper.value == 0.5

    def test_mercer_equality_random(self, rng):
        for _ in range(200):
            e = Interval(0, 2)
            r = mercer_bounds(random_sample(rng, e), e, SQUARE)
            assert close(r.value, r.sandwich_upper.value, 1e-12)


class TestDegenerate:
    def test_constant_sample(self):
        r = jensen_bounds(WeightedSample.uniform([0.5, 0.5]), Interval(0, 1), EXP)
        assert abs(r.value) <= 1e-15 and r.Q == 0.0
        assert r.sandwich_lower.value == r.sandwich_upper.value == 0.0
        assert r.violations() == []

    def test_degenerate_interval(self):
        r = jensen_bounds(WeightedSample.uniform([2.0, 2.0]), Interval(2, 2), EXP)
        for _, _, b in r.bound_items():
            assert b.applicable and b.value == 0.0

    def test_affine_all_zero(self):
        f = FunctionHandle.affine(1.0, -2.0)
        r = jensen_bounds(WeightedSample.uniform([0.0, 1.0, 3.0]), Interval(0, 3), f)
        assert r.value == 0.0 and r.B == 0.0
        assert not r.twosided_lower.applicable  # m + M = 0

    def test_outside_interval(self):
        with pytest.raises(PreconditionError):
            jensen_bounds(WeightedSample.uniform([0.0, 2.0]), Interval(0, 1), EXP)


class TestNonConvex:
    def test_logit(self):
        s = WeightedSample.uniform([0.25, 0.75])
        r = jensen_bounds(s, Interval(0.25, 0.75), LOGIT)
        for name in ("global_upper", "sharpened_upper", "twosided_lower", "twosided_upper",
                     "corollary_upper"):
            b = getattr(r, name)
            assert not b.applicable and b.value is None and b.reason
        half_M = 7.111111111111111
        assert math.isclose(r.sandwich_upper.value, half_M * r.Q, rel_tol=1e-12)
        assert math.isclose(r.sandwich_lower.value, -half_M * r.Q, rel_tol=1e-12)
        assert r.converse_lower.applicable
        assert r.violations() == []

    def test_concave_power(self):
        f = FunctionHandle.pow(0.5)
        r = jensen_bounds(WeightedSample.uniform([1.0, 4.0]), Interval(1, 4), f)
        assert not r.global_upper.applicable
        assert r.sandwich_upper.applicable and r.sandwich_upper.value < 0

    def test_unbounded_range(self):
        f = FunctionHandle.pow(1.5)
        r = jensen_bounds(WeightedSample.uniform([0.0, 1.0]), Interval(0, 1), f)
        assert r.global_upper.applicable  # convexity still decidable
        assert not r.sandwich_upper.applicable
        assert r.d2_range is None


class TestInvariants:
    @pytest.mark.parametrize("item", CONVEX_CATALOG, ids=catalog_id)
    def test_no_violations(self, item, rng):
        f, e = item
        try:
            f.second_derivative_range(e)
        except Exception:
            pytest.skip("unbounded f''")
        for _ in range(500):
            s = random_sample(rng, e)
            assert jensen_bounds(s, e, f).violations() == []
            assert mercer_bounds(s, e, f).violations() == []

    @pytest.mark.parametrize("item", CONVEX_CATALOG, ids=catalog_id)
    def test_structural_orderings(self, item, rng):
        f, e = item
        w2 = e.width ** 2
        for _ in range(300):
            s = random_sample(rng, e)
            r = jensen_bounds(s, e, f)
            # Q never exceeds (b - a)^2 / 4: the premise behind the corollary
            assert r.Q <= w2 / 4 + 1e-12 * max(1.0, w2)
            if r.twosided_lower.applicable:
                lo = r.twosided_lower.value
                tol = tolerance(lo, r.B)
                # lies between the converse and sandwich lower bounds
                a, b = sorted((r.converse_lower.value, r.sandwich_lower.value))
                assert a - tol <= lo <= b + tol
                assert r.twosided_upper.value <= r.corollary_upper.value + tol
            if r.sharpened_upper.applicable:
                assert r.sharpened_upper.value <= r.global_upper.value + tolerance(0, r.B)
            m = mercer_bounds(s, e, f)
            if m.sharpened_upper.applicable:
                assert m.sharpened_upper.value <= m.global_upper.value + tolerance(0, m.B)

    @pytest.mark.parametrize("alpha", [2.0, 0.5, 4.0])
    def test_scale_equivariance_power_of_two(self, alpha, rng):
        e = Interval(-1, 2)
        for _ in range(50):
            s = random_sample(rng, e)
            r, ra = jensen_bounds(s, e, EXP), jensen_bounds(s, e, EXP.scaled(alpha))
            assert ra.value == alpha * r.value
            assert ra.sandwich_upper.value == alpha * r.sandwich_upper.value
            assert ra.global_upper.value == alpha * r.global_upper.value

    def test_scale_equivariance_general(self, rng):
        alpha, e = 3.7, Interval(-1, 2)
        for _ in range(50):
            s = random_sample(rng, e)
            r, ra = jensen_bounds(s, e, EXP), jensen_bounds(s, e, EXP.scaled(alpha))
            for (_, _, b), (_, _, ba) in zip(r.bound_items(), ra.bound_items()):
                assert abs(ba.value - alpha * b.value) <= 1e-12 * max(1.0, alpha * abs(b.value))


class TestCharacteristicSupply:
    def test_supplied_c_mismatch_warns(self):
        s = WeightedSample.uniform([0.0, 1.0])
        r = jensen_bounds(s, Interval(0, 1), SQUARE, CharacteristicEstimate(0.6, "supplied"))
        assert len(r.warnings) == 1
        assert close(r.sharpened_upper.value, 0.6 * r.B)

    def test_supplied_c_matching_is_silent(self):
        s = WeightedSample.uniform([0.0, 1.0])
        r = jensen_bounds(s, Interval(0, 1), SQUARE, CharacteristicEstimate(0.5, "supplied"))
        assert r.warnings == ()

    def test_logit_sharpened_unavailable(self):
        r = jensen_bounds(WeightedSample.uniform([0.1, 0.3]), Interval(0.1, 0.4), LOGIT)
        assert r.global_upper.applicable
        assert not r.sharpened_upper.applicable


class TestSerialization:
    @pytest.mark.parametrize("item", CONVEX_CATALOG + [(LOGIT, Interval(0.2, 0.8))],
                             ids=catalog_id)
    def test_json_round_trip(self, item, rng):
        f, e = item
        s = random_sample(rng, e)
        for fn, cls in ((jensen_bounds, JensenBoundReport), (mercer_bounds, MercerBoundReport)):
            r = fn(s, e, f)
            back = cls.from_dict(json.loads(json.dumps(r.to_dict())))
            assert back == r

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jensen_gap import (DomainError, FunctionHandle, Interval, Kind, PreconditionError,
                        WeightedSample, jensen_functional, mercer_functional,
                        mercer_quadratic_gap, quadratic_gap)

from conftest import CATALOG, CONVEX_CATALOG, catalog_id, plain, random_sample

SQUARE = FunctionHandle.pow(2)


class TestWeightedSample:
    def test_renormalizes_small_drift(self):
        s = WeightedSample([1.0, 2.0], [0.5, 0.5 + 1e-8])
        assert math.isclose(math.fsum(s.weights), 1.0, rel_tol=1e-12)

    def test_rejects_large_drift(self):
        with pytest.raises(PreconditionError):
            WeightedSample([1.0, 2.0], [0.5, 0.6])

    @pytest.mark.parametrize("w", [[1.0, 0.0], [1.5, -0.5]])
    def test_rejects_nonpositive_weights(self, w):
        with pytest.raises(PreconditionError):
            WeightedSample([1.0, 2.0], w)

    def test_rejects_length_mismatch_and_empty(self):
        with pytest.raises(PreconditionError):
            WeightedSample([1.0, 2.0], [1.0])
        with pytest.raises(PreconditionError):
            WeightedSample([], [])

    def test_arrays_are_read_only(self):
        s = WeightedSample.uniform([1.0, 2.0])
        with pytest.raises(ValueError):
            s.points[0] = 5.0

    def test_single_point_is_legal(self):
        s = WeightedSample([3.0], [1.0])
        assert jensen_functional(s, FunctionHandle(Kind.EXP)) == 0.0


class TestInterval:
    def test_degenerate_flag(self):
        assert Interval(1, 1).degenerate
        assert not Interval(0, 1).degenerate

    def test_empty_rejected(self):
        with pytest.raises(PreconditionError):
            Interval(2, 1)


class TestJensenFunctional:
    def test_two_point_square(self):
        s = WeightedSample([0.0, 1.0], [0.5, 0.5])
        # 0.5 * (0 + 1) - 0.5^2
        assert jensen_functional(s, SQUARE) == 0.25

    @pytest.mark.parametrize("item", CATALOG, ids=catalog_id)
    def test_constant_sample_vanishes(self, item):
        f, e = item
        s = WeightedSample([e.mid] * 4, [0.1, 0.2, 0.3, 0.4])
        assert abs(jensen_functional(s, f)) <= 1e-15 * max(1.0, abs(f.eval(e.mid)))

    def test_affine_is_zero(self, rng):
        for f in (FunctionHandle.pow(1), FunctionHandle.affine(1.0, 2.0)):
            for _ in range(50):
                assert jensen_functional(random_sample(rng, Interval(0, 5)), f) == 0.0

    @pytest.mark.parametrize("item", CATALOG, ids=catalog_id)
    def test_matches_reference_sum(self, item, rng):
        f, e = item
        for _ in range(100):
            s = random_sample(rng, e)
            xs, ps = s.points.tolist(), s.weights.tolist()
            mean = math.fsum(p * x for p, x in zip(ps, xs))
            ref = math.fsum(p * plain(f, x) for p, x in zip(ps, xs)) - plain(f, mean)
            scale = max(1.0, max(abs(plain(f, x)) for x in xs))
            assert abs(jensen_functional(s, f) - ref) <= 1e-13 * scale

    def test_domain_error(self):
        with pytest.raises(DomainError):
            jensen_functional(WeightedSample.uniform([-1.0, 1.0]), FunctionHandle(Kind.NEG_LOG))

    @pytest.mark.parametrize("item", CONVEX_CATALOG, ids=catalog_id)
    def test_jensen_inequality(self, item, rng):
        f, e = item
        for _ in range(10_000):
            assert jensen_functional(random_sample(rng, e), f) >= -1e-10


class TestMercerFunctional:
    def test_single_point(self):
        s = WeightedSample([0.5], [1.0])
        assert mercer_functional(s, Interval(0, 1), SQUARE) == 0.5

    def test_all_at_left_endpoint(self):
        s = WeightedSample.uniform([0.0, 0.0, 0.0])
        assert mercer_functional(s, Interval(0, 1), SQUARE) == 0.0

    def test_two_point(self):
        s = WeightedSample([0.0, 1.0], [0.5, 0.5])
        assert mercer_functional(s, Interval(0, 1), SQUARE) == 0.25

    def test_point_outside_interval(self):
        with pytest.raises(PreconditionError):
            mercer_functional(WeightedSample.uniform([0.5, 1.5]), Interval(0, 1), SQUARE)

    @pytest.mark.parametrize("item", CONVEX_CATALOG, ids=catalog_id)
    def test_mercer_inequality(self, item, rng):
        f, e = item
        for _ in range(10_000):
            assert mercer_functional(random_sample(rng, e), e, f) >= -1e-10


class TestQuadraticGaps:
    def test_examples(self):
        assert quadratic_gap(WeightedSample([0.0, 1.0], [0.5, 0.5])) == 0.25
        assert quadratic_gap(WeightedSample.uniform([2.0] * 3)) == 0.0
        assert math.isclose(quadratic_gap(WeightedSample.uniform([1.0, 2.0, 3.0])), 2 / 3,
                            rel_tol=1e-15)

    def test_mercer_examples(self):
        assert mercer_quadratic_gap(WeightedSample([0.5], [1.0]), Interval(0, 1)) == 0.5
        assert mercer_quadratic_gap(WeightedSample.uniform([0.0, 0.0]), Interval(0, 1)) == 0.0
        assert mercer_quadratic_gap(WeightedSample([0.0, 1.0], [0.5, 0.5]), Interval(0, 1)) == 0.25

    def test_equals_jensen_of_square(self, rng):
        for e in (Interval(0, 5), Interval(0, 1), Interval(10, 11)):
            for _ in range(2000):
                s = random_sample(rng, e)
                scale = float(np.dot(s.weights, s.points ** 2))
                assert abs(quadratic_gap(s) - jensen_functional(s, SQUARE)) <= 1e-12 * max(scale, 1e-300)

    def test_mercer_identity(self, rng):
        for e in (Interval(0, 5), Interval(0, 1), Interval(10, 11)):
            for _ in range(2000):
                s = random_sample(rng, e)
                scale = max(e.lo ** 2, e.hi ** 2, 1.0)
                assert abs(mercer_quadratic_gap(s, e) - mercer_functional(s, e, SQUARE)) <= 1e-12 * scale
                assert mercer_quadratic_gap(s, e) >= 0

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=12))
    def test_quadratic_gap_nonnegative(self, xs):
        assert quadratic_gap(WeightedSample.uniform(xs)) >= 0.0


class TestLemmaPairs:
    """For convex f and x + y = a + b: 2 f(mid) <= f(x) + f(y) <= f(a) + f(b)."""

    @pytest.mark.parametrize("item", CONVEX_CATALOG, ids=catalog_id)
    def test_pair_inequality(self, item, rng):
        f, e = item
        a, b = e.lo, e.hi
        fa, fb, fm = f.eval(a), f.eval(b), f.eval(e.mid)
        tol = 1e-12 * max(1.0, abs(fa), abs(fb))
        for x in rng.uniform(a, b, 1000):
            pair = f.eval(x) + f.eval(a + b - x)
            assert 2 * fm - tol <= pair <= fa + fb + tol

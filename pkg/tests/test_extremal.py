from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from snfdist.arith import bracket, c_limit
from snfdist.errors import BudgetExceeded
from snfdist.extremal import (
    ESCAPE_CONSTANT, BVector, argmax_argmin, b_vectors, escape_sequences, expected_extrema, f0, f_value,
    limit_m_infinity, monotonicity_report, neighbour_checks,
)
from snfdist.local import mu_ps_point


def f(p, b, m, n1):
    return f_value(p, BVector(len(b), tuple(b), m, n1))


class TestValue:
    def test_zero_vector(self):
        for p, m, n1 in [(2, 3, 0), (3, 2, 1), (5, 4, 2)]:
            assert f(p, (0, 0), m, n1) == bracket(p, n1 + m) / bracket(p, n1) == f0(p, m, n1)

    def test_full_vector(self):
        assert f(3, (2, 2), 2, 1) == Fraction(1, 3 ** (2 * 3 * 2))

    def test_small_example(self):
        assert f(2, (1,), 2, 0) == Fraction(9, 16) == mu_ps_point(2, 1, 2, 2, (1,))

    @given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2), st.data())
    def test_matches_point_density(self, p, s, m, n1, data):
        b = data.draw(st.sampled_from(list(b_vectors(s, m))))
        bv = BVector(s, b, m, n1)
        assert f_value(p, bv) == mu_ps_point(p, s, n1 + m, m, bv.to_a())

    @pytest.mark.parametrize("b, m", [((2, 3), 3), ((4,), 3), ((1, -1), 2), ((1,), 0)])
    def test_invalid_vectors(self, b, m):
        with pytest.raises(ValueError):
            BVector(len(b), b, m, 0)

    def test_enumeration_order(self):
        assert list(b_vectors(2, 2)) == [(2, 2), (2, 1), (2, 0), (1, 1), (1, 0), (0, 0)]


class TestExtrema:
    def test_odd_prime(self):
        ext = argmax_argmin(3, 1, 3, 0)
        assert ext.argmax == [(0,)] and ext.max_value == bracket(3, 3)
        assert ext.agrees

    def test_two_single_step(self):
        ext = argmax_argmin(2, 1, 3, 0)
        assert ext.argmax == [(1,)]
        assert ext.max_value == bracket(2, 3) ** 2 / (bracket(2, 1) * bracket(2, 2))
        assert ext.agrees

    def test_tie_at_m_one(self):
        ext = argmax_argmin(2, 1, 1, 0)
        assert sorted(ext.argmax) == [(0,), (1,)]
        assert ext.max_value == ext.min_value == Fraction(1, 2)
        assert ext.agrees

    @pytest.mark.parametrize("s", [2, 3])
    def test_minimum_tie_for_p2_m1_zero_n_prime(self, s):
        # 2^-s is attained both at (1,...,1) and at (1,...,1,0)
        ext = argmax_argmin(2, s, 1, 0)
        ones = (1,) * s
        assert sorted(ext.argmin) == sorted([ones, ones[:-1] + (0,)])
        assert ext.min_value == Fraction(1, 2 ** s) == ext.expected_min
        assert ext.argmax == ext.expected_argmax
        assert not ext.agrees

    def test_case_analysis_elsewhere(self):
        exceptions = {(2, 2, 1, 0), (2, 3, 1, 0)}
        for p in (2, 3, 5):
            for s in (1, 2, 3):
                for m in (1, 2, 3, 4):
                    for n1 in (0, 1, 2):
                        ext = argmax_argmin(p, s, m, n1)
                        assert ext.max_value == ext.expected_max
                        assert ext.min_value == ext.expected_min
                        assert ext.agrees == ((p, s, m, n1) not in exceptions)

    def test_expected_minimiser(self):
        _, _, argmin, vmin = expected_extrema(5, 2, 3, 1)
        assert argmin == [(3, 3)] and vmin == Fraction(1, 5 ** (2 * 4 * 3))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            argmax_argmin(2, 10, 10, 0, budget=1000)


class TestMonotonicity:
    def test_examples(self):
        assert f0(2, 2, 0) == Fraction(3, 8)
        assert f0(2, 2, 1) == bracket(2, 3) / bracket(2, 1) == Fraction(21, 32)
        assert f(3, (1,), 2, 0) > f(3, (1,), 2, 1)
        assert f(2, (2, 1, 0, 0), 3, 0) == f(2, (2, 1) + (0,) * 5, 3, 0)

    def test_report_all_ok(self):
        report = monotonicity_report()
        names = {c["claim"] for c in report}
        assert {"f0-increasing-in-p", "f0-increasing-in-n-prime", "f0-decreasing-in-m",
                "nonzero-b-decreasing-in-n-prime", "nonzero-b-increasing-in-m",
                "lower-interior-raises-f", "raise-interior-lowers-f", "zero-padding-independent-of-s",
                "escape-bound-b1", "escape-bound-b-sum"} <= names
        failed = [c for c in report if not c["ok"]]
        assert failed == []

    def test_neighbour_checks_cover_interior_only(self):
        for c in neighbour_checks(3, 3, 3, 1):
            assert 1 <= c["params"]["i"] <= 2

    def test_escape_sequences(self):
        assert all(c["ok"] for c in escape_sequences())

    def test_escape_constant(self):
        assert ESCAPE_CONSTANT == pytest.approx(2980.957987, rel=1e-9)


class TestLimit:
    def test_nonzero_b(self):
        lim = limit_m_infinity(2, 1, 0, (1,), 1e-15)
        assert abs(mpf(f(2, (1,), 40, 0).numerator) / f(2, (1,), 40, 0).denominator - lim.value) < 1e-9

    def test_zero_b(self):
        for p, n1 in [(2, 0), (3, 2)]:
            lim = limit_m_infinity(p, 2, n1, (0, 0), 1e-15)
            want = c_limit(Fraction(1, p), 1e-20) / bracket(p, n1)
            assert lim.overlaps(want)

    def test_nonsingular_limit(self):
        v = f0(2, 40, 0)
        assert abs(mpf(v.numerator) / v.denominator - c_limit(Fraction(1, 2), 1e-20).value) < 1e-9

    def test_invalid(self):
        with pytest.raises(ValueError):
            limit_m_infinity(4, 1, 0, (1,))
        with pytest.raises(ValueError):
            limit_m_infinity(2, 2, 0, (1, 2))

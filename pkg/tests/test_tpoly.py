from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from snfdist.arith import bracket
from snfdist.tpoly import TPoly, bracket_poly, bracket_ratio, multinomial_poly

coeff_lists = st.lists(st.integers(-20, 20), max_size=8)
primes = st.sampled_from([2, 3, 5, 7, 11])


@given(coeff_lists, coeff_lists, primes)
def test_ring_operations_commute_with_evaluation(a, b, p):
    f, g = TPoly(a), TPoly(b)
    assert (f + g).at_prime(p) == f.at_prime(p) + g.at_prime(p)
    assert (f - g).at_prime(p) == f.at_prime(p) - g.at_prime(p)
    assert (f * g).at_prime(p) == f.at_prime(p) * g.at_prime(p)


@given(coeff_lists, st.integers(0, 6), primes)
def test_shift_is_multiplication_by_power_of_t(a, k, p):
    f = TPoly(a)
    assert f.shift(k).at_prime(p) == f.at_prime(p) * Fraction(1, p ** k)


@given(st.integers(0, 12), primes)
def test_bracket_poly_matches_exact_product(ell, p):
    assert bracket_poly(ell).at_prime(p) == bracket(p, ell)


@given(st.integers(0, 10), st.integers(0, 10), primes)
def test_bracket_ratio(top, bottom, p):
    if bottom > top:
        top, bottom = bottom, top
    assert bracket_ratio(top, bottom).at_prime(p) == bracket(p, top) / bracket(p, bottom)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=4), primes)
def test_multinomial_matches_bracket_quotient(parts, p):
    want = bracket(p, sum(parts))
    for k in parts:
        want /= bracket(p, k)
    got = multinomial_poly(parts)
    assert got.at_prime(p) == want
    # a polynomial with integer coefficients in t
    assert all(isinstance(c, int) for c in got.coeffs)


def test_gaussian_binomial_at_q_equals_one_counts_subsets():
    # [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4
    assert multinomial_poly([2, 2]) == TPoly([1, 1, 2, 1, 1])


def test_exact_div_rejects_remainder():
    with pytest.raises(ArithmeticError):
        TPoly([1, 0, 1]).exact_div(TPoly([1, -1]))


def test_order_and_degree():
    f = TPoly([0, 0, 3, 0, -1])
    assert f.order() == 2 and f.degree == 4
    assert TPoly.monomial(3, 5) == TPoly([0, 0, 0, 5])

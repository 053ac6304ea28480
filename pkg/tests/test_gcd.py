import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from oracles import brute_gcd_density
from snfdist.arith import PrimePowerSet, zeta
from snfdist.errors import BudgetExceeded
from snfdist.gcd import (
    GcdSystem, GcdTargetSpec, MultivariatePolynomial, PolynomialFormatError, eval_system, lambda_box_mod,
    lambda_crt, lambda_crt_box_check, lambda_distribution, lambda_global, lambda_ps, sigma_p,
)
from snfdist.sampler import sigma_box

X = MultivariatePolynomial.variable


def poly(d, *terms):
    return MultivariatePolynomial(d, tuple((c, tuple(e)) for c, e in terms))


PAIR = GcdSystem.coordinates(2)
ONE = GcdTargetSpec((1,))

term = st.tuples(st.integers(-4, 4).filter(bool), st.tuples(st.integers(0, 2), st.integers(0, 2)))
polys2 = st.lists(term, min_size=1, max_size=3, unique_by=lambda t: t[1]).map(lambda ts: poly(2, *ts))


class TestEval:
    def test_examples(self):
        assert eval_system(PAIR, (6, 10)) == (2,)
        assert eval_system(PAIR, (0, 0)) == (0,)
        sys = GcdSystem.single_gcd([X(2, 0, 2), poly(2, (1, (1, 1)))])
        assert eval_system(sys, (3, 5)) == (3,)

    def test_several_components(self):
        sys = GcdSystem((X(2, 0), X(2, 1), poly(2, (1, (1, 0)), (1, (0, 1)))), ((0, 1), (0, 2), (2,)))
        assert eval_system(sys, (4, 6)) == (2, 2, 10)


class TestLocal:
    def test_examples(self):
        assert lambda_ps(PAIR, 3, 1, ONE) == Fraction(8, 9)
        assert lambda_ps(GcdSystem.coordinates(1), 5, 1, ONE) == Fraction(4, 5)
        assert lambda_ps(PAIR, 2, 2, GcdTargetSpec((2,))) == Fraction(3, 16)

    def test_crt_examples(self):
        ps = PrimePowerSet(((2, 1), (3, 1)))
        assert lambda_crt(PAIR, ps, ONE) == Fraction(2, 3)
        assert lambda_crt(PAIR, PrimePowerSet(((5, 2),)), ONE) == lambda_ps(PAIR, 5, 2, ONE)

    def test_box_equals_crt_when_modulus_divides_side(self):
        ps = PrimePowerSet(((3, 1), (5, 1)))
        chk = lambda_crt_box_check(PAIR, ps, ONE, 7)
        assert chk["divides"] and chk["equal"]
        assert chk["box"] == Fraction(8, 9) * Fraction(24, 25)

    def test_box_differs_off_divisibility(self):
        chk = lambda_crt_box_check(PAIR, PrimePowerSet(((3, 1),)), ONE, 2)
        assert not chk["divides"]
        assert chk["box"] == Fraction(24, 25)
        assert chk["crt"] == Fraction(8, 9)

    @settings(max_examples=40)
    @given(polys2, st.sampled_from([(2, 1), (2, 2), (3, 1), (5, 1)]))
    def test_partition_sums_to_one_and_matches_brute_force(self, f, ps):
        p, s = ps
        q = p ** s
        sys = GcdSystem.single_gcd([f])
        dist = lambda_distribution(sys, p, s)
        assert sum(dist.values()) == 1
        fn = f.__call__
        for (g,), v in dist.items():
            assert v == brute_gcd_density([fn], 2, q, g if g else q)

    @settings(max_examples=25)
    @given(polys2, polys2, st.sampled_from([(2, 2), (3, 1)]))
    def test_two_polynomial_gcd_matches_brute_force(self, f, g, ps):
        p, s = ps
        q = p ** s
        sys = GcdSystem.single_gcd([f, g])
        for y in range(1, q + 1):
            if q % y:
                continue
            want = brute_gcd_density([f.__call__, g.__call__], 2, q, y)
            assert lambda_ps(sys, p, s, GcdTargetSpec((y,))) == want

    def test_set_algebra(self):
        # disjoint union adds up, complement is 1 minus
        dist = lambda_distribution(PAIR, 2, 3)
        ones = lambda_ps(PAIR, 2, 3, ONE)
        twos = lambda_ps(PAIR, 2, 3, GcdTargetSpec((2,)))
        assert ones + twos == dist[(1,)] + dist[(2,)]
        assert 1 - ones == sum(v for k, v in dist.items() if k != (1,))

    def test_prefix_of_multicomponent_system(self):
        sys = GcdSystem((X(2, 0), X(2, 1)), ((0,), (0, 1)))
        dist = lambda_distribution(sys, 3, 1)
        assert sum(dist.values()) == 1
        assert lambda_ps(sys, 3, 1, ONE) == Fraction(2, 3)
        assert lambda_ps(sys, 3, 1, GcdTargetSpec((1, 1))) == Fraction(2, 3)

    def test_target_longer_than_system(self):
        with pytest.raises(ValueError):
            lambda_ps(PAIR, 2, 1, GcdTargetSpec((1, 1)))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            lambda_ps(GcdSystem.coordinates(4), 7, 2, ONE, budget=1000)


class TestGlobal:
    def test_coprime_pair(self):
        res = lambda_global(PAIR, ONE)
        assert res.heuristic_tail
        assert abs(res.value.value - 1 / zeta(2, 1e-20).value) < 1e-6
        for p, f in res.per_prime_factors:
            assert f == 1 - Fraction(1, p * p)

    def test_nm_coordinates(self):
        # the p^-2 tail model overshoots a p^-4 deficit but stays inside its reported error
        res = lambda_global(GcdSystem.coordinates(4), ONE, cutoff=30)
        assert res.value.overlaps(1 / zeta(4, 1e-20))
        assert abs(res.value.value - mpf("0.923938")) < 5e-5

    def test_common_factor_gives_zero(self):
        sys = GcdSystem.single_gcd([X(2, 0, coeff=2), X(2, 1, coeff=2)])
        res = lambda_global(sys, ONE)
        assert res.value.value == 0
        assert dict(res.per_prime_factors)[2] == 0

    def test_special_prime_uses_higher_power(self):
        res = lambda_global(PAIR, GcdTargetSpec((2,)), cutoff=20)
        assert dict(res.per_prime_factors)[2] == Fraction(3, 16)
        assert abs(res.value.value - 0.25 / zeta(2, 1e-20).value) < 1e-4


class TestSigma:
    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_linear(self, p):
        assert sigma_p(X(1, 0), p) == Fraction(1, p)

    def test_examples(self):
        assert sigma_p(poly(2, (1, (1, 1))), 2) == Fraction(3, 4)
        assert sigma_p(poly(1, (1, (2,)), (1, (0,))), 3) == 0

    @settings(max_examples=60)
    @given(st.lists(st.integers(-6, 6), min_size=2, max_size=5).filter(lambda c: c[-1] != 0),
           st.sampled_from([2, 3, 5, 7, 11, 13]))
    def test_univariate_root_bound(self, coeffs, p):
        terms = [(c, (i,)) for i, c in enumerate(coeffs) if c]
        f = poly(1, *terms)
        if all(c % p == 0 for c, _ in terms):
            return  # identically zero mod p
        assert sigma_p(f, p) <= Fraction(f.degree, p)

    @settings(max_examples=30)
    @given(polys2, st.sampled_from([2, 3, 5]), st.integers(1, 6))
    def test_box_bound(self, f, p, k):
        if k <= (p - 1) // 2:
            k = (p - 1) // 2 + 1
        assert sigma_box(f, p, k) <= 4 * sigma_p(f, p)

    @settings(max_examples=30)
    @given(polys2, st.sampled_from([3, 5]))
    def test_box_exact_when_p_divides_side(self, f, p):
        k = (p - 1) // 2 + p
        assert (2 * k + 1) % p == 0
        assert sigma_box(f, p, k) == sigma_p(f, p)

    def test_sigma_box_examples(self):
        assert sigma_box(X(1, 0), 3, 4) == Fraction(1, 3)
        assert sigma_box(X(1, 0), 3, 1) == Fraction(1, 3)
        assert sigma_box(poly(2, (1, (1, 1))), 2, 2) <= 4 * Fraction(3, 4)


class TestParsing:
    def test_round_trip(self):
        sys = GcdSystem((poly(3, (-3, (2, 0, 1)), (10 ** 30, (0, 1, 0))), X(3, 2)), ((0, 1), (1,)))
        back = GcdSystem.from_json(json.dumps(sys.to_json()))
        assert back == sys

    def test_single_polynomial_document(self):
        sys = GcdSystem.from_json('{"d": 2, "terms": [{"c": "1", "e": [1, 0]}]}')
        assert sys.subsets == ((0,),)

    @pytest.mark.parametrize("doc", [
        '{"d": 2, "terms": [{"c": "0", "e": [1, 0]}]}',
        '{"d": 2, "terms": [{"c": "1", "e": [1]}]}',
        '{"d": 2, "terms": [{"c": "1", "e": [1, 0]}, {"c": "2", "e": [1, 0]}]}',
        '{"d": 2, "terms": []}',
        '{"polys": [{"d": 1, "terms": [{"c": "1", "e": [1]}]}], "subsets": [[2]]}',
        '{"polys": [{"d": 1, "terms": [{"c": "1", "e": [1]}]}, {"d": 2, "terms": [{"c": "1", "e": [1, 0]}]}]}',
    ])
    def test_invalid_documents(self, doc):
        with pytest.raises(PolynomialFormatError):
            GcdSystem.from_json(doc)

    def test_json_error_position(self):
        with pytest.raises(PolynomialFormatError, match="line 2"):
            GcdSystem.from_json('{"d": 1,\n "terms": [}')

    def test_target_validation(self):
        with pytest.raises(ValueError):
            GcdTargetSpec((0,))
        with pytest.raises(ValueError):
            GcdTargetSpec(())

    def test_box_budget(self):
        with pytest.raises(BudgetExceeded):
            lambda_box_mod(GcdSystem.coordinates(3), PrimePowerSet(((3, 1),)), ONE, 100, budget=1000)

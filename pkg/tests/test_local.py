import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (
    brute_distribution, gl_order, mu4_prefix_2_6, mu9_prefix_2_6, mup_prefix_2_6, mup_prefix_2_6_expanded,
)
from snfdist.arith import PrimePowerSet
from snfdist.errors import BudgetExceeded
from snfdist.local import (
    LocalDistribution, SnfPrefixSpec, chains, count_matrices_with_snf, enumerate_distribution, mu_crt,
    mu_distribution, mu_prefix_local, mu_ps_point, mu_ps_prefix, prefix_poly,
)
from snfdist.snf import IntegerMatrix, snf_mod
from snfdist.tpoly import TPoly

small = st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(1, 4), st.integers(1, 4))


class TestPointDensity:
    @pytest.mark.parametrize("a, want", [((2,), Fraction(3, 8)), ((0,), Fraction(1, 16)), ((1,), Fraction(9, 16))])
    def test_two_by_two_mod_two(self, a, want):
        assert mu_ps_point(2, 1, 2, 2, a) == want

    @pytest.mark.parametrize("p, a, want", [(2, (2,), 6), (2, (0,), 1), (3, (2,), 48), (2, (1,), 9)])
    def test_counts(self, p, a, want):
        assert count_matrices_with_snf(p, 1, 2, 2, a) == want

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_invertible_count_is_group_order(self, p, n):
        assert count_matrices_with_snf(p, 1, n, n, (n,)) == gl_order(n, p)

    def test_requires_orientation(self):
        with pytest.raises(ValueError):
            mu_ps_point(2, 1, 2, 3, (1,))

    @pytest.mark.parametrize("a", [(2, 1), (3,), (-1,)])
    def test_rejects_bad_chain(self, a):
        with pytest.raises(ValueError):
            mu_ps_point(2, len(a), 2, 2, a)

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            mu_ps_point(4, 1, 2, 2, (1,))

    @settings(max_examples=60)
    @given(small)
    def test_sums_to_one(self, params):
        p, s, n, m = params
        n, m = max(n, m), min(n, m)
        assert sum(mu_ps_point(p, s, n, m, a) for a in chains(s, m)) == 1

    @settings(max_examples=60)
    @given(small)
    def test_count_route_agrees(self, params):
        p, s, n, m = params
        n, m = max(n, m), min(n, m)
        for a in chains(s, m):
            assert count_matrices_with_snf(p, s, n, m, a) == mu_ps_point(p, s, n, m, a) * p ** (s * n * m)


class TestDistribution:
    def test_small_distribution(self):
        d = mu_distribution(2, 1, 2, 2)
        assert d.values == {(0,): Fraction(1, 16), (1,): Fraction(9, 16), (2,): Fraction(3, 8)}

    def test_total_and_support(self):
        d = mu_distribution(3, 2, 2, 2)
        assert d.total() == 1
        assert len(d.values) == math.comb(2 + 2, 2)
        assert len(mu_distribution(2, 1, 3, 2).values) == 3

    @pytest.mark.parametrize("p, s, n, m", [(2, 1, 2, 2), (2, 2, 2, 2), (3, 1, 2, 3), (2, 1, 3, 2), (2, 2, 1, 3)])
    def test_brute_force_oracle(self, p, s, n, m):
        want = brute_distribution(p, s, n, m)
        assert {a: v for a, v in mu_distribution(p, s, n, m).values.items() if v} == want
        assert enumerate_distribution(p, s, n, m).values == mu_distribution(p, s, n, m).values

    @given(small)
    def test_transpose_symmetry(self, params):
        p, s, n, m = params
        assert mu_distribution(p, s, n, m).values == mu_distribution(p, s, m, n).values

    def test_json_roundtrip(self):
        d = mu_distribution(3, 2, 3, 2)
        assert LocalDistribution.from_json(d.to_json()) == d

    def test_enumeration_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_distribution(3, 3, 3, 3, budget=10 ** 6)

    def test_enumeration_independent_of_thread_count(self, monkeypatch):
        monkeypatch.setenv("SNFDIST_THREADS", "1")
        one = enumerate_distribution(2, 2, 3, 2)
        monkeypatch.setenv("SNFDIST_THREADS", "4")
        assert enumerate_distribution(2, 2, 3, 2) == one


class TestPrefixDensity:
    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    @pytest.mark.parametrize("n, m", [(1, 1), (2, 2), (3, 2), (2, 4)])
    def test_first_entry_one(self, p, n, m):
        assert mu_ps_prefix(p, 0, SnfPrefixSpec((1,), n, m)) == 1 - Fraction(1, p ** (n * m))

    def test_polynomial_at_generic_prime(self):
        poly = prefix_poly(5, 0, SnfPrefixSpec((2, 6), 3, 3))
        assert poly == TPoly([1, 0, 0, 0, -1, -1, -1, 1, 1])

    def test_two_six_mod_four(self):
        spec = SnfPrefixSpec((2, 6), 2, 2)
        assert mu_ps_prefix(2, 1, spec) == Fraction(3, 128)
        hits = 0
        for e in product(range(4), repeat=4):
            if snf_mod(IntegerMatrix(2, 2, e), 4).diag == (2, 2):
                hits += 1
        assert Fraction(hits, 256) == Fraction(3, 128)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_two_six_closed_forms(self, n, m):
        spec = SnfPrefixSpec((2, 6), n, m)
        assert mu_ps_prefix(2, 1, spec) == mu4_prefix_2_6(n, m)
        assert mu_ps_prefix(3, 1, spec) == mu9_prefix_2_6(n, m)
        for p in (5, 7, 11, 13):
            assert mu_ps_prefix(p, 0, spec) == mup_prefix_2_6(p, n, m) == mup_prefix_2_6_expanded(p, n, m)

    def test_exponent_must_be_exact(self):
        with pytest.raises(ValueError):
            mu_ps_prefix(2, 2, SnfPrefixSpec((2, 6), 3, 3))

    @settings(max_examples=150)
    @given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 3), min_size=1, max_size=3),
           st.integers(1, 4), st.integers(0, 2), st.integers(1, 4))
    def test_prefix_equals_chain_sum(self, p, exps, n_extra, extra, m):
        # build a divisibility chain d_1 | ... | d_r from nondecreasing exponents of p and a cofactor
        exps = sorted(exps)
        r = len(exps)
        m = max(m, r)
        n = m + n_extra - 1 if extra else m
        cof = [1, 2 if p != 2 else 3, 7][extra]
        d = tuple(p ** e * (cof if i == r - 1 else 1) for i, e in enumerate(exps))
        spec = SnfPrefixSpec(d, n, m)
        s_j = exps[-1]
        assert mu_ps_prefix(p, s_j, spec) == mu_prefix_local(p, s_j + 1, spec)

    @settings(max_examples=40)
    @given(st.sampled_from([2, 3]), st.integers(1, 2), st.integers(1, 3), st.integers(1, 3))
    def test_prefix_matches_enumeration(self, p, s, n, m):
        if p ** (s * n * m) > 5000:
            return
        dist = enumerate_distribution(p, s, n, m)
        q = p ** s
        for e in range(s + 1):
            spec = SnfPrefixSpec((p ** e,), n, m)
            v = mu_prefix_local(p, s, spec)
            # chains whose first diagonal entry reduces to gcd(p^e, q)
            want = sum((val for a, val in dist.values.items()
                        if _first_entry(a, p, s) == math.gcd(p ** e, q) % q), Fraction(0))
            assert v == want

    def test_prefix_validation(self):
        for d, n, m in [((2, 3), 3, 3), ((), 2, 2), ((1, 1, 1), 2, 2), ((-1,), 2, 2), ((0, 1), 2, 2)]:
            with pytest.raises(ValueError):
                SnfPrefixSpec(d, n, m)
        with pytest.raises(ValueError):
            mu_prefix_local(2, 1, SnfPrefixSpec((1, 0), 2, 2))


def _first_entry(a, p, s):
    # smallest diagonal entry: p^i where i = first index with a_{i+1} > 0
    for i, x in enumerate(a):
        if x > 0:
            return p ** i
    return 0


class TestCrt:
    def test_single_factor(self):
        spec = SnfPrefixSpec((2, 6), 3, 3)
        assert mu_crt(PrimePowerSet.of((2, 2)), spec) == mu_ps_prefix(2, 1, spec)

    def test_two_primes(self):
        spec = SnfPrefixSpec((1,), 2, 2)
        assert mu_crt(PrimePowerSet.of((2, 1), (3, 1)), spec) == (1 - Fraction(1, 16)) * (1 - Fraction(1, 81))

    def test_duplicate_primes_rejected(self):
        with pytest.raises(ValueError):
            mu_crt([(2, 1), (2, 2)], SnfPrefixSpec((1,), 2, 2))

    @pytest.mark.parametrize("d", [(1,), (2,), (3,), (6,), (1, 1), (1, 2), (1, 3), (1, 6), (2, 2), (3, 3)])
    def test_mod_six_enumeration(self, d):
        spec = SnfPrefixSpec(d, 2, 2)
        target = tuple(math.gcd(x, 6) % 6 for x in d)
        hits = sum(1 for e in product(range(6), repeat=4)
                   if snf_mod(IntegerMatrix(2, 2, e), 6).diag[:len(d)] == target)
        assert Fraction(hits, 6 ** 4) == mu_crt(PrimePowerSet.of((2, 1), (3, 1)), spec)

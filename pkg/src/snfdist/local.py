"""Exact SNF densities for matrices with entries uniform on ``Z/p^sZ``.

A diagonal over ``Z/p^s`` (entries normalized to powers of p or 0) is coded
by its chain ``a = (a_1, ..., a_s)`` where ``a_i`` counts entries not
divisible by ``p^i``.  All densities here are polynomials in ``t = 1/p`` and
are returned as exact fractions.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterator, Sequence

import numpy as np

from .arith import PrimePowerSet, is_prime
from .errors import BudgetExceeded
from .snf import snf_mod_batch
from .tpoly import TPoly, bracket_ratio, multinomial_poly

Chain = tuple[int, ...]


def validate_chain(a: Sequence[int], m: int) -> Chain:
    a = tuple(int(x) for x in a)
    if not a:
        raise ValueError("chain must have at least one entry")
    prev = 0
    for x in a:
        if x < prev or x > m:
            raise ValueError(f"chain {a} must satisfy 0 <= a_1 <= ... <= a_s <= {m}")
        prev = x
    return a


def chains(s: int, m: int) -> Iterator[Chain]:
    """All chains of length s bounded by m, in lexicographic order."""
    yield from combinations_with_replacement(range(m + 1), s)


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _orient(n: int, m: int) -> tuple[int, int]:
    if n < 1 or m < 1:
        raise ValueError("matrix dimensions must be positive")
    return (n, m) if n >= m else (m, n)


@dataclass(frozen=True)
class SnfPrefixSpec:
    """The event that the first r SNF diagonal entries are ``d_1 | ... | d_r``."""

    d: tuple[int, ...]
    n: int
    m: int

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        if not d:
            raise ValueError("prefix must be nonempty")
        if self.n < 1 or self.m < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(d) > min(self.n, self.m):
            raise ValueError("prefix longer than the diagonal")
        if any(x < 0 for x in d):
            raise ValueError("prefix entries must be nonnegative")
        for i in range(len(d) - 1):
            a, b = d[i], d[i + 1]
            if a == 0 and b != 0:
                raise ValueError(f"prefix {d} breaks the divisibility chain")
            if a != 0 and b % a:
                raise ValueError(f"prefix {d} breaks the divisibility chain")
        object.__setattr__(self, "d", d)

    @property
    def r(self) -> int:
        return len(self.d)

    def degenerate_reason(self) -> str | None:
        """Why the global density is 0, or None if it is not forced to vanish."""
        if any(x == 0 for x in self.d):
            return "prefix contains a zero entry"
        if self.r == self.m == self.n:
            return "prefix fixes the full diagonal of a square matrix"
        return None


def _require_positive(spec: SnfPrefixSpec) -> None:
    if any(x == 0 for x in spec.d):
        raise ValueError("local prefix densities need positive prefix entries")


# --------------------------------------------------------------------------
# point densities


def point_poly(s: int, n: int, m: int, a: Sequence[int]) -> TPoly:
    """Density of the diagonal coded by ``a`` as a polynomial in t (needs n >= m)."""
    if n < m:
        raise ValueError("orient the matrix so that n >= m")
    a = validate_chain(a, m)
    if len(a) != s:
        raise ValueError("chain length must equal s")
    expo = sum((n - x) * (m - x) for x in a)
    steps = [a[0]] + [a[i] - a[i - 1] for i in range(1, s)]
    body = bracket_ratio(n, n - a[-1]) * multinomial_poly([m - a[-1]] + steps)
    return body.shift(expo)


def mu_ps_point(p: int, s: int, n: int, m: int, a: Sequence[int]) -> Fraction:
    """Probability that a uniform ``n x m`` matrix over Z/p^s has SNF coded by ``a``."""
    _check_prime(p)
    if s < 1:
        raise ValueError("s must be positive")
    return point_poly(s, n, m, a).at_prime(p)


def count_matrices_with_snf(p: int, s: int, n: int, m: int, a: Sequence[int]) -> int:
    """Number of ``n x m`` matrices over Z/p^s whose SNF is coded by ``a``.

    Evaluated from the product form of the count, independently of
    :func:`mu_ps_point`.
    """
    _check_prime(p)
    if n < m:
        raise ValueError("orient the matrix so that n >= m")
    a = validate_chain(a, m)
    if len(a) != s:
        raise ValueError("chain length must equal s")
    P = Fraction(p)
    val = P ** sum((n + m) * x - x * x for x in a)
    for j in range(a[-1]):
        val *= (1 - P ** (j - n)) * (1 - P ** (j - m))
    prev = 0
    for x in a:
        for j in range(1, x - prev + 1):
            val /= 1 - P ** -j
        prev = x
    if val.denominator != 1:
        raise ArithmeticError("matrix count is not an integer")
    return val.numerator


# --------------------------------------------------------------------------
# prefix sets


def tilde_a(p: int, s: int, d: Sequence[int]) -> Chain:
    """``ã_i`` = number of entries of d not divisible by ``p^i``, for i = 1..s."""
    return tuple(sum(1 for x in d if x % p ** i) for i in range(1, s + 1))


def exact_exponent(p: int, x: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def prefix_poly(p: int, s: int, spec: SnfPrefixSpec) -> TPoly:
    """Density mod ``p^(s+1)`` of the prefix event, where ``p^s || d_r``."""
    _require_positive(spec)
    n, m = _orient(spec.n, spec.m)
    r = spec.r
    at = (0,) + tilde_a(p, s, spec.d)
    steps = [at[i] - at[i - 1] for i in range(1, s + 1)]
    expo = sum((n - x) * (m - x) for x in at[1:])
    last = at[-1]
    lead = bracket_ratio(n, n - last) * multinomial_poly([m - last] + steps)
    out = lead.shift(expo)
    for ell in range(last, r):
        term = bracket_ratio(n, n - ell) * multinomial_poly([m - ell, ell - last] + steps)
        out = out - term.shift(expo + (n - ell) * (m - ell))
    return out


def mu_ps_prefix(p: int, s_j: int, spec: SnfPrefixSpec) -> Fraction:
    """Density modulo ``p^(s_j+1)`` of the prefix event, ``p^(s_j)`` exactly dividing d_r."""
    _check_prime(p)
    _require_positive(spec)
    if s_j < 0 or exact_exponent(p, spec.d[-1]) != s_j:
        raise ValueError(f"p^{s_j} is not the exact power of {p} dividing d_r = {spec.d[-1]}")
    return prefix_poly(p, s_j, spec).at_prime(p)


def prefix_chains(p: int, s: int, spec: SnfPrefixSpec) -> list[Chain]:
    """Chains mod p^s whose diagonals start with the prefix reduced mod p^s."""
    n, m = _orient(spec.n, spec.m)
    r = spec.r
    v = [min(exact_exponent(p, x), s) for x in spec.d]
    fixed = []
    for i in range(1, s + 1):
        if i <= v[-1] or v[-1] == s:
            fixed.append(sum(1 for x in v if x < i))
        else:
            break
    free = s - len(fixed)
    if free == 0:
        return [tuple(fixed)]
    out = []
    for tail in combinations_with_replacement(range(r, m + 1), free):
        out.append(tuple(fixed) + tail)
    return out


def mu_prefix_local(p: int, s: int, spec: SnfPrefixSpec) -> Fraction:
    """Density modulo ``p^s`` of the prefix event, summed over consistent chains."""
    _check_prime(p)
    _require_positive(spec)
    if s < 1:
        raise ValueError("s must be positive")
    n, m = _orient(spec.n, spec.m)
    return sum((mu_ps_point(p, s, n, m, a) for a in prefix_chains(p, s, spec)), Fraction(0))


def mu_crt(ps: PrimePowerSet, spec: SnfPrefixSpec) -> Fraction:
    """Prefix density modulo ``P = prod p^s`` as a product of local densities."""
    if not isinstance(ps, PrimePowerSet):
        ps = PrimePowerSet(tuple(ps))
    out = Fraction(1)
    for p, s in ps:
        out *= mu_prefix_local(p, s, spec)
    return out


# --------------------------------------------------------------------------
# distributions


@dataclass
class LocalDistribution:
    p: int
    s: int
    n: int
    m: int
    values: dict[Chain, Fraction] = field(default_factory=dict)

    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def to_json(self) -> dict:
        return {
            "p": self.p, "s": self.s, "n": self.n, "m": self.m,
            "entries": [
                {"a": list(a), "num": str(v.numerator), "den": str(v.denominator)}
                for a, v in sorted(self.values.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "LocalDistribution":
        if isinstance(obj, str):
            obj = json.loads(obj)
        vals = {}
        for e in obj["entries"]:
            vals[tuple(int(x) for x in e["a"])] = Fraction(int(e["num"]), int(e["den"]))
        return cls(int(obj["p"]), int(obj["s"]), int(obj["n"]), int(obj["m"]), vals)


def mu_distribution(p: int, s: int, n: int, m: int) -> LocalDistribution:
    """All chain densities from the closed form."""
    _check_prime(p)
    N, M = _orient(n, m)
    vals = {a: mu_ps_point(p, s, N, M, a) for a in chains(s, M)}
    return LocalDistribution(p, s, n, m, vals)


def worker_count() -> int:
    """Worker cap from SNFDIST_THREADS (default: number of CPUs)."""
    env = os.environ.get("SNFDIST_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def _histogram(p: int, s: int, n: int, m: int, lo: int, hi: int) -> dict[Chain, int]:
    q = p ** s
    k = n * m
    idx = np.arange(lo, hi, dtype=np.int64)
    digits = (idx[:, None] // (q ** np.arange(k, dtype=np.int64))[None, :]) % q
    vals = snf_mod_batch(digits.reshape(-1, n, m), p, s)
    # a_i = number of diagonal entries with valuation < i
    codes = np.zeros(len(idx), dtype=np.int64)
    r = min(n, m)
    for i in range(1, s + 1):
        codes = codes * (r + 1) + (vals < i).sum(axis=1)
    uniq, cnt = np.unique(codes, return_counts=True)
    out = {}
    for c, num in zip(uniq.tolist(), cnt.tolist()):
        a = []
        for _ in range(s):
            a.append(c % (r + 1))
            c //= r + 1
        out[tuple(reversed(a))] = num
    return out


def enumeration_histogram(p: int, s: int, n: int, m: int, budget: int = 10 ** 6,
                          chunk: int = 1 << 16) -> tuple[dict[Chain, int], int]:
    """Chain counts over all ``n x m`` matrices mod p^s, and the total count."""
    _check_prime(p)
    total = (p ** s) ** (n * m)
    if total > budget:
        raise BudgetExceeded(f"{total} matrices exceed budget {budget}")
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    hist: dict[Chain, int] = {}
    workers = min(worker_count(), len(ranges))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda r: _histogram(p, s, n, m, *r), ranges))
    else:
        parts = [_histogram(p, s, n, m, *r) for r in ranges]
    for part in parts:
        for a, c in part.items():
            hist[a] = hist.get(a, 0) + c
    return hist, total


def enumerate_distribution(p: int, s: int, n: int, m: int, budget: int = 10 ** 6) -> LocalDistribution:
    """Chain distribution by running SNF over every matrix mod p^s."""
    hist, total = enumeration_histogram(p, s, n, m, budget)
    M = min(n, m)
    vals = {a: Fraction(hist.get(a, 0), total) for a in chains(s, M)}
    return LocalDistribution(p, s, n, m, vals)


def chain_of_diagonal(diag: Sequence[int], p: int, s: int) -> Chain:
    """Chain of a diagonal already normalized mod p^s (0 = zero class)."""
    v = [s if x == 0 else min(exact_exponent(p, x), s) for x in diag]
    return tuple(sum(1 for x in v if x < i) for i in range(1, s + 1))


__all__ = [
    "Chain", "SnfPrefixSpec", "LocalDistribution", "validate_chain", "chains",
    "point_poly", "mu_ps_point", "count_matrices_with_snf", "tilde_a", "prefix_poly",
    "mu_ps_prefix", "prefix_chains", "mu_prefix_local", "mu_crt", "mu_distribution",
    "enumerate_distribution", "enumeration_histogram", "chain_of_diagonal", "worker_count",
]

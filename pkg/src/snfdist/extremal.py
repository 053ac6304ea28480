"""The point density in co-rank coordinates, its extrema and monotonicity.

With ``b_i = m - a_i`` (so ``m = b_0 >= b_1 >= ... >= b_s >= 0``) and
``n' = n - m`` the density of a diagonal over ``Z/p^s`` reads

    f(p, s, m, n', b) = p^(-sum (n' + b_i) b_i) [n'+m][m] / ([n'+b_s][b_s] prod [b_{i-1} - b_i]).

Everything here is exact except :func:`limit_m_infinity`, which involves
``C_p = prod_j (1 - p^-j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator

import mpmath

from .arith import ErrorBoundedReal, bracket, c_limit, is_prime
from .errors import BudgetExceeded

ESCAPE_CONSTANT = math.exp(8)


@dataclass(frozen=True)
class BVector:
    s: int
    b: tuple[int, ...]
    m: int
    n_prime: int

    def __post_init__(self):
        b = tuple(int(x) for x in self.b)
        if self.s < 1 or self.m < 1 or self.n_prime < 0:
            raise ValueError("need s >= 1, m >= 1 and n' >= 0")
        if len(b) != self.s:
            raise ValueError(f"b must have {self.s} entries")
        prev = self.m
        for x in b:
            if x > prev or x < 0:
                raise ValueError(f"b = {b} must satisfy {self.m} >= b_1 >= ... >= b_s >= 0")
            prev = x
        object.__setattr__(self, "b", b)

    @property
    def is_zero(self) -> bool:
        return not any(self.b)

    def to_a(self) -> tuple[int, ...]:
        return tuple(self.m - x for x in self.b)


def f_value(p: int, bv: BVector) -> Fraction:
    """Exact density of the diagonal with co-rank vector ``bv`` over ``Z/p^s``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n1, m, b = bv.n_prime, bv.m, bv.b
    expo = sum((n1 + x) * x for x in b)
    den = bracket(p, n1 + b[-1]) * bracket(p, b[-1])
    prev = m
    for x in b:
        den *= bracket(p, prev - x)
        prev = x
    return Fraction(1, p ** expo) * bracket(p, n1 + m) * bracket(p, m) / den


def f0(p: int, m: int, n_prime: int) -> Fraction:
    """``f`` at ``b = 0``: ``prod_{j=n'+1}^{n'+m} (1 - p^-j)``."""
    out = Fraction(1)
    for j in range(n_prime + 1, n_prime + m + 1):
        out *= 1 - Fraction(1, p ** j)
    return out


def b_vectors(s: int, m: int) -> Iterator[tuple[int, ...]]:
    """All ``m >= b_1 >= ... >= b_s >= 0`` in reverse-lexicographic order."""
    for c in combinations_with_replacement(range(m, -1, -1), s):
        yield c


@dataclass
class Extremum:
    p: int
    s: int
    m: int
    n_prime: int
    argmax: list[tuple[int, ...]]
    argmin: list[tuple[int, ...]]
    max_value: Fraction
    min_value: Fraction
    expected_argmax: list[tuple[int, ...]]
    expected_max: Fraction
    expected_argmin: list[tuple[int, ...]]
    expected_min: Fraction

    @property
    def agrees(self) -> bool:
        return (sorted(self.argmax) == sorted(self.expected_argmax)
                and self.max_value == self.expected_max
                and sorted(self.argmin) == sorted(self.expected_argmin)
                and self.min_value == self.expected_min)


def expected_extrema(p: int, s: int, m: int, n_prime: int):
    """Predicted maximizers, maximum, minimizer and minimum."""
    zero, one, full = (0,) * s, (1,) * s, (m,) * s
    if (p, s, n_prime) == (2, 1, 0):
        if m == 1:
            # (0) and (1) are the only vectors and share the value 1/2
            return [zero, one], Fraction(1, 2), [zero, one], Fraction(1, 2)
        top = [one]
        vmax = bracket(2, m) ** 2 / (bracket(2, 1) * bracket(2, m - 1))
    else:
        top = [zero]
        vmax = bracket(p, n_prime + m) / bracket(p, n_prime)
    return top, vmax, [full], Fraction(1, p ** (s * (n_prime + m) * m))


def argmax_argmin(p: int, s: int, m: int, n_prime: int, budget: int = 10 ** 6) -> Extremum:
    """Exhaustive search over all co-rank vectors."""
    if math.comb(m + s, s) > budget:
        raise BudgetExceeded(f"{math.comb(m + s, s)} vectors exceed budget {budget}")
    vals = {b: f_value(p, BVector(s, b, m, n_prime)) for b in b_vectors(s, m)}
    vmax, vmin = max(vals.values()), min(vals.values())
    top, emax, bottom, emin = expected_extrema(p, s, m, n_prime)
    return Extremum(
        p, s, m, n_prime,
        [b for b, v in vals.items() if v == vmax],
        [b for b, v in vals.items() if v == vmin],
        vmax, vmin, top, emax, bottom, emin,
    )


def neighbour_checks(p: int, s: int, m: int, n_prime: int) -> Iterator[dict]:
    """Strict neighbour inequalities at every interior position ``1 <= i <= s-1``.

    Lowering ``b_i`` when ``b_i > b_{i+1}`` raises f; raising ``b_i`` when
    ``b_i < b_{i-1}`` lowers f.
    """
    for b in b_vectors(s, m):
        base = f_value(p, BVector(s, b, m, n_prime))
        full = (m,) + b
        for i in range(1, s):
            if full[i] > full[i + 1]:
                lower = list(b)
                lower[i - 1] -= 1
                v = f_value(p, BVector(s, tuple(lower), m, n_prime))
                yield {"claim": "lower-interior-raises-f",
                       "params": {"p": p, "s": s, "m": m, "n_prime": n_prime, "b": list(b), "i": i},
                       "ok": v > base}
            if full[i] < full[i - 1]:
                upper = list(b)
                upper[i - 1] += 1
                v = f_value(p, BVector(s, tuple(upper), m, n_prime))
                yield {"claim": "raise-interior-lowers-f",
                       "params": {"p": p, "s": s, "m": m, "n_prime": n_prime, "b": list(b), "i": i},
                       "ok": v < base}


def _claim(name: str, ok: bool, **params) -> dict:
    return {"claim": name, "params": params, "ok": bool(ok)}


def monotonicity_report(primes: Iterable[int] = (2, 3, 5), s_values: Iterable[int] = (1, 2, 3),
                        m_values: Iterable[int] = (1, 2, 3, 4),
                        n_prime_values: Iterable[int] = (0, 1, 2)) -> list[dict]:
    """Check every monotonicity statement exactly over the given ranges."""
    primes, s_values = sorted(primes), sorted(s_values)
    m_values, n_values = sorted(m_values), sorted(n_prime_values)
    out: list[dict] = []
    # b = 0: increasing in p and n', decreasing in m
    for m in m_values:
        for n1 in n_values:
            for p, q in zip(primes, primes[1:]):
                out.append(_claim("f0-increasing-in-p", f0(p, m, n1) < f0(q, m, n1), p=p, q=q, m=m, n_prime=n1))
            for p in primes:
                out.append(_claim("f0-increasing-in-n-prime", f0(p, m, n1) < f0(p, m, n1 + 1),
                                  p=p, m=m, n_prime=n1))
                out.append(_claim("f0-decreasing-in-m", f0(p, m, n1) > f0(p, m + 1, n1),
                                  p=p, m=m, n_prime=n1))
    # b != 0: decreasing in n', increasing in m
    for p in primes:
        for s in s_values:
            for m in m_values:
                for b in b_vectors(s, m):
                    if not any(b):
                        continue
                    for n1 in n_values:
                        here = f_value(p, BVector(s, b, m, n1))
                        out.append(_claim("nonzero-b-decreasing-in-n-prime",
                                          here > f_value(p, BVector(s, b, m, n1 + 1)),
                                          p=p, s=s, m=m, n_prime=n1, b=list(b)))
                        out.append(_claim("nonzero-b-increasing-in-m",
                                          here < f_value(p, BVector(s, b, m + 1, n1)),
                                          p=p, s=s, m=m, n_prime=n1, b=list(b)))
                        out.append(_claim("escape-bound-b-sum",
                                          here <= Fraction(1, p ** sum(b)) * ESCAPE_CONSTANT,
                                          p=p, s=s, m=m, n_prime=n1, b=list(b)))
                        out.append(_claim("escape-bound-b1",
                                          here <= Fraction(1, p ** b[0]) * ESCAPE_CONSTANT,
                                          p=p, s=s, m=m, n_prime=n1, b=list(b)))
                        nonzero = sum(1 for x in b if x)
                        out.append(_claim("escape-bound-nonzero-count",
                                          here <= Fraction(1, p ** nonzero) * ESCAPE_CONSTANT,
                                          p=p, s=s, m=m, n_prime=n1, b=list(b)))
                for n1 in n_values:
                    for ch in neighbour_checks(p, s, m, n1):
                        out.append(ch)
    # once b has a trailing zero, more zeros do not change f
    for p in primes:
        for m in m_values:
            for n1 in n_values:
                for r in range(1, 3):
                    for head in b_vectors(r, m):
                        if not head[-1]:
                            continue
                        vals = {f_value(p, BVector(s, head + (0,) * (s - r), m, n1))
                                for s in range(r + 1, r + 5)}
                        out.append(_claim("zero-padding-independent-of-s", len(vals) == 1,
                                          p=p, m=m, n_prime=n1, b=list(head)))
    out.extend(escape_sequences(primes))
    return out


def _max_over_m(p: int, s: int, n1: int, b: tuple[int, ...], span: int = 8) -> Fraction:
    return max(f_value(p, BVector(s, b, m, n1)) for m in range(max(b[0], 1), max(b[0], 1) + span))


def escape_sequences(primes: Iterable[int] = (2, 3, 5, 7, 11)) -> list[dict]:
    """Finite prefixes of the sequences along which f tends to zero, checked for strict decrease."""
    out = []
    primes = sorted(set(primes) | {2, 3, 5, 7, 11})
    for b in [(1,), (2, 1), (1, 1)]:
        s = len(b)
        seq = [_max_over_m(p, s, 0, b) for p in primes]
        out.append(_claim("escape-growing-p", all(x > y for x, y in zip(seq, seq[1:])),
                          b=list(b), primes=primes))
    for p in (2, 3):
        seq = [_max_over_m(p, 1, n1, (1,)) for n1 in range(6)]
        out.append(_claim("escape-growing-n-prime", all(x > y for x, y in zip(seq, seq[1:])), p=p))
        seq = [_max_over_m(p, 1, 0, (j,)) for j in range(1, 6)]
        out.append(_claim("escape-growing-b-sum", all(x > y for x, y in zip(seq, seq[1:])), p=p, s=1))
        seq = [_max_over_m(p, r, 0, (1,) * r) for r in range(1, 6)]
        out.append(_claim("escape-growing-nonzero-count", all(x > y for x, y in zip(seq, seq[1:])), p=p))
    return out


def limit_m_infinity(p: int, s: int, n_prime: int, b, tol=1e-15) -> ErrorBoundedReal:
    """``lim_{m -> inf} f(p, s, m, n', b)`` with the entries of b held fixed.

    For ``b = 0`` this is ``C_p / [p, n']``.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    b = tuple(int(x) for x in b)
    if len(b) != s:
        raise ValueError(f"b must have {s} entries")
    if any(x < y for x, y in zip(b, b[1:])) or (b and b[-1] < 0):
        raise ValueError("b must be nonincreasing and nonnegative")
    cp = c_limit(Fraction(1, p), mpmath.mpf(tol) / 4)
    if not any(b):
        return cp / ErrorBoundedReal.exact(bracket(p, n_prime))
    expo = sum((n_prime + x) * x for x in b)
    den = bracket(p, n_prime + b[-1]) * bracket(p, b[-1])
    for x, y in zip(b, b[1:]):
        den *= bracket(p, x - y)
    return cp * ErrorBoundedReal.exact(Fraction(1, p ** expo) / den)

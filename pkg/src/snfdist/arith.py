"""Exact and certified arithmetic.

Finite products such as ``[p, l] = prod_{j<=l} (1 - p^-j)`` are handled with
:class:`fractions.Fraction`.  Infinite products over primes and zeta values
are :class:`ErrorBoundedReal` instances: an ``mpmath`` value with a rigorous
absolute error radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Protocol, Sequence, Union

import mpmath
import numpy as np
from mpmath import mpf

from .errors import PrecisionFailure

ExactRational = Fraction

#: Working precision (bits of significand) for every high precision value.
PREC = 192

#: Largest prime cutoff the product engine will sieve to before giving up.
MAX_PRIME_CUTOFF = 20_000_000

_ULP = 2.0 ** -52

Number = Union[int, Fraction, mpf, "ErrorBoundedReal"]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _mp(x) -> mpf:
    with mpmath.workprec(PREC):
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return mpf(x)


def _mp_up(x) -> mpf:
    """Conversion that never rounds downward (for error radii)."""
    if isinstance(x, Fraction):
        return mpmath.fdiv(x.numerator, x.denominator, prec=PREC, rounding="u")
    if isinstance(x, (int, float, mpf)):
        return mpmath.fadd(x, 0, prec=PREC, rounding="u")
    v = _mp(x)
    return v + _rounding(v)


def _to_fraction(x: mpf) -> Fraction:
    man, exp = x.man_exp
    return Fraction(man) * Fraction(2) ** exp


def _rounding(x: mpf) -> mpf:
    """One-ulp rounding allowance at the working precision."""
    with mpmath.workprec(PREC):
        return abs(x) * mpf(2) ** (2 - PREC)


@dataclass(frozen=True)
class ErrorBoundedReal:
    """A real number known to lie in ``[value - abs_error, value + abs_error]``."""

    value: mpf
    abs_error: mpf

    def __post_init__(self):
        raw = self.value
        value = _mp(raw)
        err = _mp_up(self.abs_error)
        if err < 0 or not mpmath.isfinite(err):
            raise ValueError(f"abs_error must be finite and nonnegative, got {err}")
        if isinstance(raw, mpf):
            exact = value == raw
        elif isinstance(raw, (int, Fraction, float)):
            exact = _to_fraction(value) == raw
        else:
            exact = False
        if not exact:
            err = mpmath.fadd(err, _rounding(value), prec=PREC, rounding="u")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "abs_error", err)

    @classmethod
    def exact(cls, x) -> "ErrorBoundedReal":
        if isinstance(x, ErrorBoundedReal):
            return x
        if isinstance(x, (int, Fraction)):
            v = _mp(Fraction(x))
            err = mpf(0) if isinstance(x, int) and abs(x) < 2 ** PREC else _rounding(v)
            return cls(v, err)
        v = _mp(x)
        return cls(v, mpf(0))

    @classmethod
    def from_interval(cls, lo, hi) -> "ErrorBoundedReal":
        with mpmath.workprec(PREC + 16):
            lo, hi = _mp(lo), _mp(hi)
            if hi < lo:
                raise ValueError("empty interval")
            mid = (lo + hi) / 2
            rad = (hi - lo) / 2
        return cls(mid, rad + _rounding(mid))

    @property
    def lo(self) -> mpf:
        return mpmath.fsub(self.value, self.abs_error, exact=True)

    @property
    def hi(self) -> mpf:
        return mpmath.fadd(self.value, self.abs_error, exact=True)

    def contains(self, x) -> bool:
        if isinstance(x, ErrorBoundedReal):
            x = x.value
        if isinstance(x, Fraction):
            return _to_fraction(self.lo) <= x <= _to_fraction(self.hi)
        x = x if isinstance(x, mpf) else _mp(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "ErrorBoundedReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __float__(self) -> float:
        return float(self.value)

    def __neg__(self) -> "ErrorBoundedReal":
        return ErrorBoundedReal(mpmath.fneg(self.value, exact=True), self.abs_error)

    def __add__(self, other: Number) -> "ErrorBoundedReal":
        o = ErrorBoundedReal.exact(other)
        with mpmath.workprec(PREC):
            v = self.value + o.value
            err = self.abs_error + o.abs_error + _rounding(v)
            return ErrorBoundedReal(v, err + _rounding(err))

    __radd__ = __add__

    def __sub__(self, other: Number) -> "ErrorBoundedReal":
        return self + (-ErrorBoundedReal.exact(other))

    def __rsub__(self, other: Number) -> "ErrorBoundedReal":
        return ErrorBoundedReal.exact(other) + (-self)

    def __mul__(self, other: Number) -> "ErrorBoundedReal":
        o = ErrorBoundedReal.exact(other)
        with mpmath.workprec(PREC):
            v = self.value * o.value
            err = (abs(self.value) * o.abs_error + abs(o.value) * self.abs_error
                   + self.abs_error * o.abs_error + _rounding(v))
            return ErrorBoundedReal(v, err + _rounding(err))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "ErrorBoundedReal":
        o = ErrorBoundedReal.exact(other)
        with mpmath.workprec(PREC):
            den = abs(o.value) - o.abs_error
            if den <= 0:
                raise ZeroDivisionError("divisor interval contains zero")
            v = self.value / o.value
            err = (self.abs_error + abs(v) * o.abs_error) / den + _rounding(v)
            return ErrorBoundedReal(v, err + _rounding(err))

    def __rtruediv__(self, other: Number) -> "ErrorBoundedReal":
        return ErrorBoundedReal.exact(other) / self

    def to_json(self, digits: int = 15) -> dict:
        return {
            "value": mpmath.nstr(self.value, digits, min_fixed=-5, max_fixed=5),
            "abs_error": mpmath.nstr(self.abs_error, 3),
        }

    def __repr__(self) -> str:
        return (f"ErrorBoundedReal({mpmath.nstr(self.value, 20)} "
                f"± {mpmath.nstr(self.abs_error, 3)})")


# --------------------------------------------------------------------------
# primes


@lru_cache(maxsize=4)
def _sieve(bound: int) -> np.ndarray:
    """Array of all primes < bound."""
    if bound <= 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(bound, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(bound - 1) + 1):
        if flags[i]:
            flags[i * i::i] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_below(bound: int) -> list[int]:
    """All primes strictly below ``bound``, increasing."""
    if bound < 2:
        raise ValueError("bound must be at least 2")
    return [int(p) for p in _sieve(int(bound))]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    i = 17
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n >= 1`` as increasing ``(p, e)`` pairs."""
    if n < 1:
        raise ValueError("can only factor positive integers")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def valuation(x: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``x``."""
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class PrimePowerSet:
    """Finite set of ``(p, s)`` pairs with distinct primes, kept sorted by p."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((int(p), int(s)) for p, s in self.pairs))
        for i, (p, s) in enumerate(pairs):
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if s < 1:
                raise ValueError(f"exponent for {p} must be positive")
            if i and pairs[i - 1][0] == p:
                raise ValueError(f"duplicate prime {p}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> "PrimePowerSet":
        return cls(tuple(pairs))

    @property
    def modulus(self) -> int:
        out = 1
        for p, s in self.pairs:
            out *= p ** s
        return out

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


# --------------------------------------------------------------------------
# q-Pochhammer products


def q_pochhammer(t, ell: int) -> Fraction:
    """Exact ``prod_{j=1}^{ell} (1 - t^j)`` for rational ``0 < t <= 1``."""
    t = as_fraction(t)
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    out = Fraction(1)
    tj = Fraction(1)
    for _ in range(ell):
        tj *= t
        out *= 1 - tj
    return out


def bracket(p: int, ell: int) -> Fraction:
    """The finite product ``[p, ell]`` = q_pochhammer(1/p, ell)."""
    return q_pochhammer(Fraction(1, p), ell)


def c_limit(t, tol=1e-30) -> ErrorBoundedReal:
    """``C(t) = prod_{j>=1} (1 - t^j)`` for ``0 < t <= 1/2`` with error <= tol.

    Truncating after k factors leaves ``0 <= [1/t,k] - C(t) <= [1/t,k] t^{k+1}/(1-t)``.
    """
    t = as_fraction(t)
    if not 0 < t <= Fraction(1, 2):
        raise ValueError("t must lie in (0, 1/2]")
    tol = _mp(tol)
    with mpmath.workprec(PREC + 20):
        x = _mp(t)
        prod = mpf(1)
        xk = mpf(1)
        k = 0
        while True:
            k += 1
            xk *= x
            prod *= 1 - xk
            gap = prod * xk * x / (1 - x)
            if gap <= tol / 4:
                break
        # C lies in [prod - gap, prod]
        rounding = prod * k * mpf(2) ** (4 - PREC)
        return ErrorBoundedReal(prod - gap / 2, gap / 2 + rounding)


# --------------------------------------------------------------------------
# zeta values


def zeta(i: int, tol=1e-40) -> ErrorBoundedReal:
    """Riemann zeta at an integer ``i >= 2`` by Euler-Maclaurin summation.

    For real arguments the remainder after the last Bernoulli term is bounded
    by the first omitted term; twice that magnitude is reported.
    """
    if int(i) != i or i < 2:
        raise ValueError("zeta needs an integer argument >= 2")
    i = int(i)
    tol = _mp(tol)
    N = 64
    with mpmath.workprec(PREC + 32):
        s = mpf(i)
        total = mpmath.fsum(mpf(n) ** -s for n in range(1, N))
        total += mpf(N) ** (1 - s) / (s - 1) + mpf(N) ** (-s) / 2
        rising = s  # s (s+1) ... (s+2k-2)
        k = 1
        while True:
            term = (mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)
                    * rising * mpf(N) ** (-s - 2 * k + 1))
            rising_next = rising * (s + 2 * k - 1) * (s + 2 * k)
            nxt = (mpmath.bernoulli(2 * k + 2) / mpmath.factorial(2 * k + 2)
                   * rising_next * mpf(N) ** (-s - 2 * k - 1))
            total += term
            if 2 * abs(nxt) <= tol / 2:
                break
            if k > 200:
                raise PrecisionFailure(f"zeta({i}) did not reach tol {tol}")
            rising = rising_next
            k += 1
        err = 2 * abs(nxt) + abs(total) * N * mpf(2) ** (8 - PREC)
        return ErrorBoundedReal(total, err)


def zeta_euler_product(i: int, tol=1e-12) -> ErrorBoundedReal:
    """ζ(i) as the reciprocal of the certified product ``prod_p (1 - p^-i)``."""
    if int(i) != i or i < 2:
        raise ValueError("zeta needs an integer argument >= 2")
    from .tpoly import TPoly

    inv = prime_product(PolyDeficit(TPoly.monomial(int(i))), _mp(tol) / 4, use_zeta=False).value
    return 1 / inv


def inverse_zeta_product(start: int, tol=1e-30, stop: int | None = None) -> ErrorBoundedReal:
    """``1 / prod_{i=start}^{stop} ζ(i)``; ``stop=None`` means the infinite product."""
    if start < 2:
        raise ValueError("start must be >= 2")
    tol = _mp(tol)
    if stop is not None:
        out = ErrorBoundedReal.exact(1)
        count = max(stop - start + 1, 1)
        for i in range(start, stop + 1):
            out = out / zeta(i, tol / (8 * count))
        return out
    # zeta(i) - 1 <= 2^-i (1 + 2/(i-1)); the tail product lies in [1 - sum, 1]
    with mpmath.workprec(PREC):
        stop = start
        while True:
            tail = mpmath.fsum(mpf(2) ** -j * (1 + mpf(2) / (j - 1))
                               for j in range(stop + 1, stop + 400))
            if tail <= tol / 4:
                break
            stop += 1
    head = inverse_zeta_product(start, tol / 4, stop)
    with mpmath.workprec(PREC):
        lo = head.lo * (1 - tail)
        hi = head.hi
    return ErrorBoundedReal.from_interval(lo, hi)


# --------------------------------------------------------------------------
# certified products over primes


class Deficit(Protocol):
    """Per-prime deficit ``delta_p = 1 - factor(p)`` in [0, 1)."""

    def exact(self, p: int) -> mpf:
        """delta_p at working precision (relative error below 2^(16-PREC))."""

    def floats(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """float64 deficits for large primes and absolute error bounds."""

    def majorant(self, cutoff: int) -> tuple[float, int]:
        """``(c, e)`` with ``delta_p <= c p^-e`` for every prime p > cutoff."""


class PolyDeficit:
    """Deficit ``1 - F(1/p)`` of an integer polynomial F with F(0) = 1."""

    def __init__(self, deficit):
        # deficit: TPoly equal to 1 - F
        self.poly = deficit
        coeffs = deficit.coeffs
        nz = [k for k, c in enumerate(coeffs) if c]
        if not nz:
            self.e = None
            return
        self.e = nz[0]
        if self.e < 2:
            raise ValueError("deficit must vanish to order >= 2 for the product to converge")
        self._shifted = coeffs[self.e:]

    def exact(self, p: int) -> mpf:
        if self.e is None:
            return mpf(0)
        # extra guard bits absorb cancellation between coefficients
        with mpmath.workprec(PREC + 64):
            t = mpf(1) / p
            acc = mpf(0)
            for c in reversed(self.poly.coeffs):
                acc = acc * t + c
        return +acc

    def floats(self, p: np.ndarray):
        t = 1.0 / p.astype(np.float64)
        if self.e is None:
            z = np.zeros_like(t)
            return z, z
        t_max = float(t.max()) if t.size else 0.0
        coeffs = _truncate_for_float(self._shifted, t_max)
        val = np.zeros_like(t)
        absval = np.zeros_like(t)
        for c in reversed(coeffs):
            val = val * t + float(c)
            absval = absval * t + abs(float(c))
        scale = t ** self.e
        val *= scale
        absval *= scale
        # dropped high-order terms are bounded by the same relative allowance
        err = (len(coeffs) + 6) * _ULP * absval + 1e-300
        return val, err

    def zeta_exponents(self) -> dict[int, int] | None:
        """Exponents ``b_i`` with ``F = prod_i (1 - t^i)^{b_i}`` exactly, or None.

        When they exist the product over all primes is ``prod_i zeta(i)^{-b_i}``.
        """
        if self.e is None:
            return {}
        from .tpoly import TPoly

        F = TPoly.const(1) - self.poly
        D = 2 * F.degree
        # peel factors off the power series G = F / prod (1 - t^i)^{b_i}, truncated at degree D
        g = list(F.coeffs) + [0] * (D + 1 - len(F.coeffs))
        out = {}
        for i in range(1, D + 1):
            b = -g[i]
            if not b:
                continue
            if abs(b) > D:
                return None  # no short factorization; exponents blow up
            out[i] = b
            # divide by (1 - t^i)^b: multiply by (1 - t^i)^-b term by term
            for _ in range(abs(b)):
                if b > 0:   # divide by (1 - t^i): g_k += g_{k-i}
                    for k in range(i, D + 1):
                        g[k] += g[k - i]
                else:       # multiply by (1 - t^i)
                    for k in range(D, i - 1, -1):
                        g[k] -= g[k - i]
        num, den = TPoly.const(1), TPoly.const(1)
        for i, b in out.items():
            f = TPoly.const(1) - TPoly.monomial(i)
            for _ in range(abs(b)):
                if b > 0:
                    num = num * f
                else:
                    den = den * f
        if F * den != num or out.get(1):
            return None
        return out

    def majorant(self, cutoff: int) -> tuple[float, int]:
        if self.e is None:
            return 0.0, 2
        total = Fraction(0)
        for j, c in enumerate(self._shifted):
            if c:
                total += Fraction(abs(c), cutoff ** j)
        return float(total) * (1 + 1e-12), self.e


def _truncate_for_float(coeffs: Sequence[int], t_max: float) -> list[int]:
    """Drop trailing coefficients whose contribution is below 2^-80 of the lead."""
    if not coeffs or t_max <= 0:
        return list(coeffs[:1])
    lead = abs(coeffs[0]) or 1
    log_lead = math.log2(lead)
    log_t = math.log2(t_max)
    keep = len(coeffs)
    for j in range(len(coeffs) - 1, 0, -1):
        c = coeffs[j]
        if c and math.log2(abs(c)) + j * log_t > log_lead - 80:
            keep = j + 1
            break
    else:
        keep = 1
    return list(coeffs[:keep])


class QTailDeficit:
    """Deficit ``1 - prod_{j>=start} (1 - p^-j)``."""

    def __init__(self, start: int = 2):
        if start < 2:
            raise ValueError("start must be >= 2")
        self.start = start

    def exact(self, p: int) -> mpf:
        with mpmath.workprec(PREC + 20):
            x = mpf(1) / p
            prod = mpf(1)
            j = self.start
            while True:
                xj = x ** j
                if xj < mpf(2) ** (-PREC - 20):
                    break
                prod *= 1 - xj
                j += 1
            return 1 - prod

    def floats(self, p: np.ndarray):
        t = 1.0 / p.astype(np.float64)
        log_prod = np.zeros_like(t)
        for j in range(self.start, self.start + 40):
            log_prod += np.log1p(-t ** j)
        val = -np.expm1(log_prod)
        return val, val * 200 * _ULP + t ** (self.start + 40)

    def majorant(self, cutoff: int) -> tuple[float, int]:
        return 1.0 / (1.0 - 1.0 / cutoff), self.start


@dataclass(frozen=True)
class PrimeProduct:
    """Certified ``prod_p (1 - delta_p)`` and its complement ``1 - prod``."""

    value: ErrorBoundedReal
    complement: ErrorBoundedReal
    cutoff: int


def _choose_cutoff(deficit: Deficit, tol: mpf, start: int) -> tuple[int, mpf]:
    P = max(int(start), 3)
    while True:
        c, e = deficit.majorant(P)
        with mpmath.workprec(PREC):
            tail = mpf(c) / ((e - 1) * mpf(P) ** (e - 1))
            if tail <= tol:
                return P, tail
            target = int(mpmath.ceil((mpf(c) / ((e - 1) * tol)) ** (mpf(1) / (e - 1))))
        P = max(target, P + 1)
        if P > MAX_PRIME_CUTOFF:
            raise PrecisionFailure(
                f"prime cutoff {P} needed for tol {mpmath.nstr(tol, 3)} exceeds {MAX_PRIME_CUTOFF}"
            )


def _zeta_quotient(deficit: PolyDeficit, excluded: set[int], tol: mpf) -> PrimeProduct | None:
    """Exact Euler-product route: ``prod_i zeta(i)^{-b_i}`` divided by the excluded factors.

    Returns None when F has no short factorization or vanishes at an excluded prime.
    """
    expo = deficit.zeta_exponents()
    if not expo:
        return None
    factors = []
    for q in sorted(excluded):
        f = Fraction(0)
        for c in reversed(deficit.poly.coeffs):
            f = f / q + c
        factors.append(1 - f)
    if any(f == 0 for f in factors):
        return None
    count = sum(abs(b) for b in expo.values()) + len(factors) + 1
    with mpmath.workprec(PREC):
        value = ErrorBoundedReal.exact(1)
        for i, b in sorted(expo.items()):
            z = zeta(i, tol * mpf(2) ** -40 / count)
            for _ in range(abs(b)):
                value = value / z if b > 0 else value * z
        for f in factors:
            value = value / ErrorBoundedReal(f, 0)
        complement = 1 - value
    return PrimeProduct(value, complement, 0)


def prime_product(deficit: Deficit, tol=1e-16, *, exclude: Iterable[int] = (),
                  mp_cutoff: int = 2000, min_cutoff: int = 3, use_zeta: bool = True) -> PrimeProduct:
    """Certified product over all primes not in ``exclude`` of ``1 - delta_p``.

    Primes up to the adaptive cutoff P are multiplied in (high precision up to
    ``mp_cutoff``, vectorized float64 with propagated error bounds beyond);
    the remaining tail uses ``prod (1 - delta) >= 1 - sum delta`` with the
    deficit's majorant ``c n^-e`` summed over all integers n > P.  If that
    cutoff is out of reach and ``use_zeta`` is set, polynomials that factor
    into ``(1 - t^i)`` terms are evaluated through zeta values instead.
    """
    tol = _mp(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    excluded = set(int(q) for q in exclude)
    try:
        P, tail = _choose_cutoff(deficit, tol / 4, min_cutoff)
    except PrecisionFailure:
        # slowly vanishing deficits: fall back on zeta values when F factors into (1 - t^i)
        exact = None
        if use_zeta and isinstance(deficit, PolyDeficit):
            exact = _zeta_quotient(deficit, excluded, tol)
        if exact is None:
            raise
        return exact
    primes = _sieve(P + 1)
    with mpmath.workprec(PREC + 16):
        small = [int(q) for q in primes[primes <= mp_cutoff] if int(q) not in excluded]
        log_sum = mpf(0)
        log_err = mpf(0)
        for q in small:
            d = deficit.exact(q)
            if d >= 1:
                zero = ErrorBoundedReal(0, 0)
                return PrimeProduct(zero, ErrorBoundedReal(1, 0), P)
            term = mpmath.log1p(-d)
            log_sum += term
            # deficits carry relative error below 2^(16 - PREC)
            log_err += abs(term) * mpf(2) ** (20 - PREC)
        log_err += abs(log_sum) * len(small) * mpf(2) ** (-PREC - 12)
        large = primes[primes > mp_cutoff]
        if excluded and large.size:
            large = large[~np.isin(large, np.array(sorted(excluded), dtype=np.int64))]
        if large.size:
            vals, errs = deficit.floats(large)
            if np.any(vals >= 1) or np.any(vals < -errs):
                raise PrecisionFailure("float deficits left [0, 1); raise mp_cutoff")
            vals = np.clip(vals, 0.0, None)
            logs = np.log1p(-vals)
            log_sum += mpf(math.fsum(logs.tolist()))
            bound = float(np.sum(errs / (1.0 - vals)) + 4 * _ULP * np.sum(-logs))
            log_err += mpf(bound) * (1 + mpf(2) ** -40) + mpf(2) ** -1070 * len(logs)
        log_tail_lo = mpmath.log1p(-tail)
        lo_log = log_sum - log_err + log_tail_lo
        hi_log = log_sum + log_err
        value = ErrorBoundedReal.from_interval(mpmath.exp(lo_log), mpmath.exp(hi_log))
        complement = ErrorBoundedReal.from_interval(-mpmath.expm1(hi_log), -mpmath.expm1(lo_log))
    return PrimeProduct(value, complement, P)

"""SNF densities over Z as certified products over all primes.

Every prime contributes a local factor.  Primes dividing the data of the
event get exact rational factors; all other primes share one polynomial
deficit ``1 - F(1/p)`` and are multiplied by :func:`arith.prime_product`,
which also bounds the infinite tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
from mpmath import mpf

from .arith import (PREC, ErrorBoundedReal, PolyDeficit, as_fraction, factorize,
                    prime_product, primes_below, q_pochhammer)
from .local import SnfPrefixSpec, exact_exponent, mu_ps_prefix, prefix_poly
from .tpoly import TPoly, bracket_ratio, multinomial_poly


@dataclass
class GlobalDensityResult:
    value: ErrorBoundedReal
    prime_cutoff: int
    per_prime_factors: list[tuple[int, Fraction]] = field(default_factory=list)
    complement: Optional[ErrorBoundedReal] = None
    warning: Optional[str] = None

    def to_json(self, digits: int = 12) -> dict:
        out = {
            "value": mpmath.nstr(self.value.value, digits, min_fixed=-5, max_fixed=5),
            "abs_error": mpmath.nstr(self.value.abs_error, 3),
            "prime_cutoff": self.prime_cutoff,
        }
        if self.complement is not None:
            out["complement"] = mpmath.nstr(self.complement.value, digits)
        if self.per_prime_factors:
            out["per_prime_factors"] = [[p, f"{f.numerator}/{f.denominator}"]
                                        for p, f in self.per_prime_factors]
        if self.warning:
            out["warning"] = self.warning
        return out


def _exact_result(x: Fraction, warning: str | None = None) -> GlobalDensityResult:
    v = ErrorBoundedReal.exact(x)
    return GlobalDensityResult(v, 0, [], ErrorBoundedReal.exact(1 - x), warning)


# --------------------------------------------------------------------------
# prefix events


def generic_prefix_poly(spec: SnfPrefixSpec) -> TPoly:
    """Local density at primes not dividing d_r (the same polynomial for all of them)."""
    return prefix_poly(2, 0, spec)


def mu_global_prefix(spec: SnfPrefixSpec, tol=1e-12, list_below: int = 30) -> GlobalDensityResult:
    """Density over Z of the event that the SNF starts with ``spec.d``."""
    reason = spec.degenerate_reason()
    if reason:
        return _exact_result(Fraction(0), f"density is 0: {reason}")
    special = [p for p, _ in factorize(spec.d[-1])]
    factors = {p: mu_ps_prefix(p, exact_exponent(p, spec.d[-1]), spec) for p in special}
    exact_part = Fraction(1)
    for f in factors.values():
        exact_part *= f
    generic = generic_prefix_poly(spec)
    listed = dict(factors)
    for p in primes_below(max(list_below, 3)):
        listed.setdefault(p, generic.at_prime(p))
    per_prime = sorted(listed.items())
    if exact_part == 0:
        return GlobalDensityResult(ErrorBoundedReal.exact(0), 0, per_prime,
                                   ErrorBoundedReal.exact(1))
    tol = mpf(tol)
    prod = prime_product(PolyDeficit(TPoly.const(1) - generic), tol / (2 * float(exact_part)),
                         exclude=special)
    value = prod.value * ErrorBoundedReal.exact(exact_part)
    return GlobalDensityResult(value, prod.cutoff, per_prime, 1 - value)


def deficit_majorant_check(spec: SnfPrefixSpec) -> dict:
    """Compare the generic deficit with the bound ``2^r p^-((n-r+1)(m-r+1))`` at p >= 2.

    Returns the leading exponent, the worst ratio ``deficit * p^e / 2^r`` over
    small primes, and the coefficient majorant used by the product engine.
    The bound holds for every prime once the majorant at ``t = 1/2`` is at most ``2^r``.
    """
    n, m = max(spec.n, spec.m), min(spec.n, spec.m)
    r = spec.r
    e = (n - r + 1) * (m - r + 1)
    deficit = TPoly.const(1) - generic_prefix_poly(spec)
    worst = Fraction(0)
    for p in primes_below(200):
        d = deficit.at_prime(p)
        worst = max(worst, d * p ** e / 2 ** r)
    # sum |c_k| t^(k-e) is increasing in t, so its value at t = 1/2 bounds every prime
    c, order = PolyDeficit(deficit).majorant(2)
    return {"order": order, "expected_order": e, "worst_ratio": worst,
            "holds": order == e and c <= 2 ** r, "coefficient_majorant_at_2": c}


# --------------------------------------------------------------------------
# cyclic cokernels


def cyclic_local_poly(n: int, ell: int) -> TPoly:
    """``Z_n(p, ell)``: probability over Z_p that at most ell SNF entries differ from 1."""
    if not 0 <= ell <= n:
        raise ValueError("need 0 <= ell <= n")
    out = TPoly()
    for i in range(ell + 1):
        # [n]^2 / ([i]^2 [n-i]) = gaussian binomial (n, i) * [n]/[i]
        term = multinomial_poly([i, n - i]) * bracket_ratio(n, i)
        out = out + term.shift(i * i)
    return out


def z_n_l(n: int, ell: int, tol=1e-14) -> GlobalDensityResult:
    """Density of n x n matrices whose SNF has at most ell entries different from 1."""
    if n < 1 or ell < 1:
        raise ValueError("need n >= 1 and ell >= 1")
    if ell > n:
        raise ValueError("ell cannot exceed n")
    if ell == n:
        return _exact_result(Fraction(1))
    deficit = TPoly.const(1) - cyclic_local_poly(n, ell)
    prod = prime_product(PolyDeficit(deficit), mpf(tol) / 2)
    return GlobalDensityResult(prod.value, prod.cutoff,
                               [(p, cyclic_local_poly(n, ell).at_prime(p)) for p in (2, 3, 5)],
                               prod.complement)


def z_n(n: int, tol=1e-14) -> GlobalDensityResult:
    """Density of n x n matrices with cyclic cokernel."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return z_n_l(n, 1, tol)


class CyclicDeficit:
    """Deficit ``1 - Z(p, ell) = C(1/p) sum_{i>ell} p^-(i^2) / [p, i]^2``."""

    def __init__(self, ell: int):
        if ell < 0:
            raise ValueError("ell must be nonnegative")
        self.ell = ell
        self.e = (ell + 1) ** 2

    def exact(self, p: int) -> mpf:
        with mpmath.workprec(PREC + 32):
            x = mpf(1) / p
            return _c_of(x) * _tail_sum(x, self.ell)

    def floats(self, p: np.ndarray):
        x = 1.0 / p.astype(np.float64)
        log_c = np.zeros_like(x)
        for j in range(1, 12):
            log_c += np.log1p(-x ** j)
        total = np.zeros_like(x)
        log_br = np.zeros_like(x)
        for j in range(1, self.ell + 1):
            log_br += np.log1p(-x ** j)
        for i in range(self.ell + 1, self.ell + 4):
            log_br += np.log1p(-x ** i)
            total += np.exp(i * i * np.log(x) - 2 * log_br)
        val = np.exp(log_c) * total
        return val, val * 1e-13 + x ** ((self.ell + 4) ** 2)

    def majorant(self, cutoff: int) -> tuple[float, int]:
        # 1/C(x) <= e^{2x/(1-x)} and sum_{i>ell} x^(i^2) <= x^e / (1 - x)
        x = 1.0 / cutoff
        return math.exp(2 * x / (1 - x)) / (1 - x) * (1 + 1e-12), self.e


def _c_of(x: mpf) -> mpf:
    """``prod_{j>=1} (1 - x^j)`` to working precision (x <= 1/2)."""
    prod = mpf(1)
    xj = mpf(1)
    eps = mpf(2) ** (-mpmath.mp.prec - 8)
    while True:
        xj *= x
        if xj < eps:
            return prod
        prod *= 1 - xj


def _tail_sum(x: mpf, ell: int) -> mpf:
    """``sum_{i>ell} x^(i^2) / [1/x, i]^2``."""
    br = mpf(1)
    for j in range(1, ell + 1):
        br *= 1 - x ** j
    total = mpf(0)
    eps = mpf(2) ** (-mpmath.mp.prec - 8)
    i = ell + 1
    while True:
        br *= 1 - x ** i
        term = x ** (i * i) / (br * br)
        total += term
        if term < eps * total:
            return total
        i += 1


def z_local(p: int, ell: int) -> mpf:
    """``Z(p, ell) = C(1/p) sum_{i<=ell} p^-(i^2) / [p, i]^2``."""
    with mpmath.workprec(PREC + 32):
        x = mpf(1) / p
        br = mpf(1)
        total = mpf(0)
        for i in range(ell + 1):
            if i:
                br *= 1 - x ** i
            total += x ** (i * i) / (br * br)
        return _c_of(x) * total


def z_l(ell: int, tol=1e-16, relative: bool = True) -> GlobalDensityResult:
    """``Z(ell)``, the large-n limit of ``Z_n(ell)``.

    With ``relative=True`` the tolerance applies relative to ``1 - Z(ell)``,
    which is what the asymptotic columns need.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    deficit = CyclicDeficit(ell)
    tol = mpf(tol)
    if relative:
        tol = tol * deficit.exact(2)
    prod = prime_product(deficit, tol / 2)
    return GlobalDensityResult(prod.value, prod.cutoff, [], prod.complement)


@dataclass
class AsymptoticsResidual:
    """``p^((l+1)^2) C_p (1 - Z(p, l)) = 1 - 2 p^-(l+2)/(1-1/p) + delta1 + delta2``."""

    ell: int
    p: int
    scaled_residual: ErrorBoundedReal
    delta1: ErrorBoundedReal
    delta2: ErrorBoundedReal
    global_scaled: Optional[ErrorBoundedReal] = None
    log_column: Optional[ErrorBoundedReal] = None

    def bounds_hold(self) -> bool:
        bound = mpf(self.p) ** (-2 * self.ell)
        return (self.delta2.lo > 0 and self.delta2.hi < bound
                and self.delta1.lo >= 0 and self.delta1.hi <= bound)

    def identity_gap(self) -> mpf:
        with mpmath.workprec(PREC):
            x = mpf(1) / self.p
            rhs = 1 - 2 * x ** (self.ell + 2) / (1 - x) + self.delta1.value + self.delta2.value
            return abs(self.scaled_residual.value - rhs)


def z_l_residual(ell: int, p: int = 2, tol=1e-16) -> AsymptoticsResidual:
    """Split the local deficit of ``Z(p, ell)`` into its leading terms and the two remainders.

    For ``p = 2`` the global ``2^((l+1)^2) (1 - Z(l))`` and
    ``-log2(1 - C_2 2^((l+1)^2) (1 - Z(l)))`` are attached too.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    work = PREC + 64
    with mpmath.workprec(work):
        x = mpf(1) / p
        e = (ell + 1) ** 2
        eps = mpf(2) ** (-work)
        # prod_{j>i} (1 - x^j)^2, accumulated downwards from a far cutoff
        J = ell + 2
        while x ** J > eps:
            J += 1
        tails = {}
        acc = mpf(1)
        for j in range(J, ell + 1, -1):
            acc *= (1 - x ** j) ** 2
            tails[j - 1] = acc
        lead_tail = tails[ell + 1]
        delta1 = lead_tail - (1 - 2 * x ** (ell + 2) / (1 - x))
        delta2 = mpf(0)
        i = ell + 2
        while True:
            term = x ** (i * i - e) * tails.get(i, mpf(1))
            delta2 += term
            if term < eps:
                break
            i += 1
        scaled = (1 - 2 * x ** (ell + 2) / (1 - x)) + delta1 + delta2
        # direct route: x^-e * C * (1 - Z(p, l)) from the tail sum
        direct = x ** (-e) * _c_of(x) ** 2 * _tail_sum(x, ell)
        err = abs(direct - scaled) + abs(scaled) * mpf(2) ** (24 - work)
    res = AsymptoticsResidual(
        ell, p,
        ErrorBoundedReal(direct, err),
        ErrorBoundedReal(delta1, abs(delta1) * mpf(2) ** (24 - work) + mpf(2) ** (8 - work)),
        ErrorBoundedReal(delta2, abs(delta2) * mpf(2) ** (24 - work) + mpf(2) ** (8 - work)),
    )
    if p == 2:
        res.global_scaled, res.log_column = table_scaled_columns(ell, tol)
    return res


def table_scaled_columns(ell: int, tol=1e-16, zl: GlobalDensityResult | None = None):
    """``2^((l+1)^2)(1 - Z(l))`` and ``-log2(1 - C_2 * that)``."""
    from .arith import c_limit

    if zl is None:
        zl = z_l(ell, tol)
    scale = mpf(2) ** ((ell + 1) ** 2)
    scaled = zl.complement * scale
    c2 = c_limit(Fraction(1, 2), mpf(2) ** -(PREC - 8))
    inner = 1 - c2 * scaled
    with mpmath.workprec(PREC):
        lo = -mpmath.log(inner.hi) / mpmath.log(2)
        hi = -mpmath.log(inner.lo) / mpmath.log(2)
    return scaled, ErrorBoundedReal.from_interval(lo, hi)


@dataclass
class TableRow:
    ell: int
    z: ErrorBoundedReal
    one_minus_z: ErrorBoundedReal
    scaled: ErrorBoundedReal
    log_column: ErrorBoundedReal


def table_zl(lmax: int = 10, tol=1e-16) -> list[TableRow]:
    rows = []
    for ell in range(1, lmax + 1):
        zl = z_l(ell, tol)
        scaled, logc = table_scaled_columns(ell, tol, zl)
        rows.append(TableRow(ell, zl.value, zl.complement, scaled, logc))
    return rows


def _decimal(x) -> Decimal:
    return Decimal(mpmath.nstr(mpf(x), 40, strip_zeros=False))


def format_sig(x, digits: int = 12, sci: bool = False) -> str:
    """Round to ``digits`` significant digits, plain or in ``1.23e-4`` form."""
    d = _decimal(x)
    if sci:
        return f"{d:.{digits - 1}e}"
    if d == 0:
        return "0." + "0" * (digits - 1)
    q = Decimal(1).scaleb(d.adjusted() - digits + 1)
    return f"{d.quantize(q, rounding=ROUND_HALF_EVEN):f}"


def format_fixed(x, places: int = 12) -> str:
    q = Decimal(1).scaleb(-places)
    return f"{_decimal(x).quantize(q, rounding=ROUND_HALF_EVEN):f}"


TABLE_HEADER = "l,Z(l),1-Z(l),2^((l+1)^2)(1-Z(l)),-log2(1-C2*2^((l+1)^2)(1-Z(l)))"


def table_csv(rows: list[TableRow]) -> str:
    lines = [TABLE_HEADER]
    for row in rows:
        lines.append(",".join([
            str(row.ell),
            format_fixed(row.z.value, 12),
            format_sig(row.one_minus_z.value, 12, sci=True),
            format_sig(row.scaled.value, 12),
            format_sig(row.log_column.value, 12),
        ]))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Y functions


def y_function(t, ell: int, n: int | None = None) -> Fraction:
    """``Y_n(1/t, ell)`` for finite n, or its increasing limit ``Y(1/t, ell)`` when n is None.

    ``Y_n = ([1]/[n]) Z_n(1/t, ell)``; the limit is the finite sum
    ``(1 - t) sum_{i<=ell} t^(i^2) / [1/t, i]^2`` and hence exact.
    """
    t = as_fraction(t)
    if not 0 < t <= Fraction(1, 2):
        raise ValueError("t must lie in (0, 1/2]")
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if n is not None:
        if n < max(ell, 1):
            raise ValueError("need n >= ell")
        return cyclic_local_poly(n, ell).eval_fraction(t) * (1 - t) / q_pochhammer(t, n)
    total = sum((t ** (i * i) / q_pochhammer(t, i) ** 2 for i in range(ell + 1)), Fraction(0))
    return (1 - t) * total

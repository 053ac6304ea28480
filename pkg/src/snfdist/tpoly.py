"""Integer polynomials in ``t = 1/p``.

Local densities are polynomials in ``1/p`` with integer coefficients.  Keeping
them symbolic gives exact values at any prime and explicit coefficient bounds
for certifying infinite products.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class TPoly:
    """Polynomial ``sum c_k t^k`` with integer coefficients (immutable)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = [int(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def const(cls, c: int) -> "TPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "TPoly":
        if k < 0:
            raise ValueError("negative exponent")
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self) -> int:
        """Lowest exponent with a nonzero coefficient (-1 for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return -1

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = TPoly.const(other)
        return isinstance(other, TPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "TPoly":
        if isinstance(other, int):
            other = TPoly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return TPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "TPoly":
        return TPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "TPoly":
        if isinstance(other, int):
            other = TPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "TPoly":
        return TPoly.const(other) - self

    def __mul__(self, other) -> "TPoly":
        if isinstance(other, int):
            return TPoly(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return TPoly()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return TPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "TPoly":
        """Multiply by ``t^k``."""
        if not self.coeffs:
            return self
        return TPoly((0,) * k + self.coeffs)

    def exact_div(self, other: "TPoly") -> "TPoly":
        """Quotient of an exact division by a polynomial with constant term +-1."""
        den = other.coeffs
        if not den or den[0] not in (1, -1):
            raise ValueError("divisor must have constant term +-1")
        num = list(self.coeffs)
        if not num:
            return TPoly()
        qlen = len(num) - len(den) + 1
        if qlen <= 0:
            raise ArithmeticError("division is not exact")
        q = [0] * qlen
        for k in range(qlen):
            c = num[k] * den[0]
            q[k] = c
            if c:
                for j, d in enumerate(den):
                    num[k + j] -= c * d
        if any(num):
            raise ArithmeticError("division is not exact")
        return TPoly(q)

    def eval_fraction(self, t: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def at_prime(self, p: int) -> Fraction:
        """Exact value at ``t = 1/p`` (Horner on integers)."""
        num = 0
        for c in self.coeffs:
            num = num * p + c
        # num = sum c_k p^(deg-k)
        return Fraction(num, p ** max(self.degree, 0))

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __repr__(self) -> str:
        if not self.coeffs:
            return "TPoly(0)"
        terms = [f"{c}*t^{k}" for k, c in enumerate(self.coeffs) if c]
        return "TPoly(" + " + ".join(terms) + ")"


@lru_cache(maxsize=None)
def bracket_poly(ell: int) -> TPoly:
    """``prod_{j=1}^{ell} (1 - t^j)``."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    out = TPoly.const(1)
    for j in range(1, ell + 1):
        out = out * (TPoly.const(1) - TPoly.monomial(j))
    return out


@lru_cache(maxsize=None)
def bracket_ratio(top: int, bottom: int) -> TPoly:
    """``[top]/[bottom] = prod_{j=bottom+1}^{top} (1 - t^j)`` for top >= bottom."""
    if bottom > top or bottom < 0:
        raise ValueError("need 0 <= bottom <= top")
    out = TPoly.const(1)
    for j in range(bottom + 1, top + 1):
        out = out * (TPoly.const(1) - TPoly.monomial(j))
    return out


def multinomial_poly(parts) -> TPoly:
    """Gaussian multinomial ``[sum parts] / prod [part]`` as a polynomial in t."""
    parts = [int(x) for x in parts]
    if any(x < 0 for x in parts):
        raise ValueError("parts must be nonnegative")
    total = sum(parts)
    # cancel the largest part first so the division stays small
    k = max(range(len(parts)), key=parts.__getitem__) if parts else 0
    den = TPoly.const(1)
    for i, x in enumerate(parts):
        if i != k:
            den = den * bracket_poly(x)
    top = parts[k] if parts else 0
    return bracket_ratio(total, top).exact_div(den)

"""Distribution of multi-gcds of polynomial values.

For polynomials ``F_1, ..., F_h`` in d variables and index subsets
``U_1, ..., U_w`` the vector ``g(x)`` has components
``g_i(x) = gcd(F(x) : F in U_i)`` (0 when all of them vanish).  Local
densities modulo ``p^s`` are computed by exhaustive enumeration; units are
identified by replacing each component by its gcd with the modulus.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .arith import ErrorBoundedReal, PrimePowerSet, factorize, is_prime, primes_below
from .errors import BudgetExceeded

DEFAULT_BUDGET = 2 * 10 ** 6


class PolynomialFormatError(ValueError):
    """Malformed polynomial or system description."""


@dataclass(frozen=True)
class MultivariatePolynomial:
    """Nonzero integer polynomial given by ``(coefficient, exponents)`` terms."""

    d: int
    terms: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("need at least one variable")
        terms = []
        seen = set()
        for c, e in self.terms:
            c, e = int(c), tuple(int(x) for x in e)
            if len(e) != self.d or any(x < 0 for x in e):
                raise ValueError(f"exponent vector {e} does not fit {self.d} variables")
            if c == 0:
                raise ValueError("zero coefficients are not allowed")
            if e in seen:
                raise ValueError(f"duplicate exponent vector {e}")
            seen.add(e)
            terms.append((c, e))
        if not terms:
            raise ValueError("the zero polynomial is not allowed")
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def variable(cls, d: int, i: int, power: int = 1, coeff: int = 1) -> "MultivariatePolynomial":
        e = [0] * d
        e[i] = power
        return cls(d, ((coeff, tuple(e)),))

    @property
    def degree(self) -> int:
        return max(sum(e) for _, e in self.terms)

    def __call__(self, x: Sequence[int]) -> int:
        total = 0
        for c, e in self.terms:
            v = c
            for xi, k in zip(x, e):
                if k:
                    v *= xi ** k
            total += v
        return total

    def eval_mod(self, X: np.ndarray, q: int) -> np.ndarray:
        """Values mod q for rows of ``X`` (shape ``(B, d)``), vectorized."""
        if q > 2 ** 31:
            raise ValueError("modulus too large for vectorized evaluation")
        X = np.asarray(X, dtype=np.int64) % q
        out = np.zeros(X.shape[0], dtype=np.int64)
        for c, e in self.terms:
            v = np.full(X.shape[0], c % q, dtype=np.int64)
            for j, k in enumerate(e):
                for _ in range(k):
                    v = v * X[:, j] % q
            out = (out + v) % q
        return out

    def abs_bound(self, k: int) -> int:
        """Upper bound on ``|F(x)|`` for ``max |x_i| <= k``."""
        return sum(abs(c) * k ** sum(e) for c, e in self.terms)

    def to_json(self) -> dict:
        return {"d": self.d, "terms": [{"c": str(c), "e": list(e)} for c, e in self.terms]}

    @classmethod
    def from_json(cls, obj) -> "MultivariatePolynomial":
        try:
            d = int(obj["d"])
            terms = tuple((int(t["c"]), tuple(int(x) for x in t["e"])) for t in obj["terms"])
            return cls(d, terms)
        except (KeyError, TypeError, ValueError) as e:
            raise PolynomialFormatError(f"bad polynomial: {e}") from None


@dataclass(frozen=True)
class GcdSystem:
    """Polynomials plus the index subsets whose gcds form g(x) (indices 0-based)."""

    polys: tuple[MultivariatePolynomial, ...]
    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        polys = tuple(self.polys)
        if not polys:
            raise ValueError("need at least one polynomial")
        d = polys[0].d
        if any(f.d != d for f in polys):
            raise ValueError("all polynomials must use the same number of variables")
        subsets = tuple(tuple(int(i) for i in u) for u in self.subsets)
        if not subsets:
            raise ValueError("need at least one subset")
        for u in subsets:
            if not u or any(not 0 <= i < len(polys) for i in u):
                raise ValueError(f"subset {u} must be nonempty and index existing polynomials")
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "subsets", subsets)

    @property
    def d(self) -> int:
        return self.polys[0].d

    @property
    def w(self) -> int:
        return len(self.subsets)

    @classmethod
    def single_gcd(cls, polys: Sequence[MultivariatePolynomial]) -> "GcdSystem":
        """One component: the gcd of all the polynomials."""
        return cls(tuple(polys), (tuple(range(len(polys))),))

    @classmethod
    def coordinates(cls, d: int) -> "GcdSystem":
        """gcd of d independent coordinates."""
        return cls.single_gcd([MultivariatePolynomial.variable(d, i) for i in range(d)])

    def to_json(self) -> dict:
        return {
            "polys": [f.to_json() for f in self.polys],
            "subsets": [[i + 1 for i in u] for u in self.subsets],
        }

    @classmethod
    def from_json(cls, obj) -> "GcdSystem":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as e:
                raise PolynomialFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
        try:
            if "polys" in obj:
                polys = [MultivariatePolynomial.from_json(f) for f in obj["polys"]]
            else:
                polys = [MultivariatePolynomial.from_json(obj)]
            subsets = obj.get("subsets") or [list(range(1, len(polys) + 1))]
            subsets = [[int(i) - 1 for i in u] for u in subsets]
            return cls(tuple(polys), tuple(tuple(u) for u in subsets))
        except (TypeError, AttributeError) as e:
            raise PolynomialFormatError(f"bad system: {e}") from None
        except ValueError as e:
            raise PolynomialFormatError(str(e)) from None


@dataclass(frozen=True)
class GcdTargetSpec:
    """The event ``g_i(x) = y_i`` for ``i <= r``."""

    y: tuple[int, ...]

    def __post_init__(self):
        y = tuple(int(v) for v in self.y)
        if not y:
            raise ValueError("target must be nonempty")
        if any(v < 1 for v in y):
            raise ValueError("target values must be positive")
        object.__setattr__(self, "y", y)

    @property
    def r(self) -> int:
        return len(self.y)

    def check(self, sys: GcdSystem) -> None:
        if self.r > sys.w:
            raise ValueError(f"target has {self.r} entries but the system has {sys.w} components")


def eval_system(sys: GcdSystem, x: Sequence[int]) -> tuple[int, ...]:
    """The multi-gcd vector g(x)."""
    x = [int(v) for v in x]
    if len(x) != sys.d:
        raise ValueError(f"expected {sys.d} coordinates")
    vals = [f(x) for f in sys.polys]
    return tuple(math.gcd(*(vals[i] for i in u)) for u in sys.subsets)


def _normalize(c: int, q: int) -> int:
    g = math.gcd(c, q)
    return 0 if g == q else g


def _grid(q: int, d: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    return (idx[:, None] // (q ** np.arange(d, dtype=np.int64))[None, :]) % q


def _gvec_mod(sys: GcdSystem, X: np.ndarray, q: int) -> np.ndarray:
    """Normalized g-vectors mod q for rows of X, shape ``(B, w)``."""
    vals = [f.eval_mod(X, q) for f in sys.polys]
    out = np.empty((X.shape[0], sys.w), dtype=np.int64)
    for j, u in enumerate(sys.subsets):
        g = np.full(X.shape[0], q, dtype=np.int64)
        for i in u:
            g = np.gcd(g, vals[i])
        out[:, j] = np.where(g == q, 0, g)
    return out


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise BudgetExceeded(f"{count} points exceed budget {budget}")


def lambda_distribution(sys: GcdSystem, p: int, s: int, budget: int = DEFAULT_BUDGET,
                        chunk: int = 1 << 16) -> dict[tuple[int, ...], Fraction]:
    """Exact law of the normalized g-vector for x uniform on ``(Z/p^s)^d``."""
    if not is_prime(p) or s < 1:
        raise ValueError("need a prime p and s >= 1")
    q = p ** s
    total = q ** sys.d
    _check_budget(total, budget)
    counts: dict[tuple[int, ...], int] = {}
    for lo in range(0, total, chunk):
        G = _gvec_mod(sys, _grid(q, sys.d, lo, min(lo + chunk, total)), q)
        uniq, cnt = np.unique(G, axis=0, return_counts=True)
        for row, c in zip(uniq.tolist(), cnt.tolist()):
            key = tuple(row)
            counts[key] = counts.get(key, 0) + c
    return {k: Fraction(v, total) for k, v in sorted(counts.items())}


def lambda_ps(sys: GcdSystem, p: int, s: int, spec: GcdTargetSpec,
              budget: int = DEFAULT_BUDGET) -> Fraction:
    """``lambda_{p^s}`` of the target event, by enumeration of ``(Z/p^s)^d``."""
    spec.check(sys)
    q = p ** s
    target = tuple(_normalize(y, q) for y in spec.y)
    dist = lambda_distribution(sys, p, s, budget)
    return sum((v for k, v in dist.items() if k[:spec.r] == target), Fraction(0))


def lambda_crt(sys: GcdSystem, ps: PrimePowerSet, spec: GcdTargetSpec,
               budget: int = DEFAULT_BUDGET) -> Fraction:
    """Density modulo ``P = prod p^s`` as the product of local densities."""
    if not isinstance(ps, PrimePowerSet):
        ps = PrimePowerSet(tuple(ps))
    out = Fraction(1)
    for p, s in ps:
        out *= lambda_ps(sys, p, s, spec, budget)
    return out


def lambda_box_mod(sys: GcdSystem, ps: PrimePowerSet, spec: GcdTargetSpec, k: int,
                   budget: int = DEFAULT_BUDGET, chunk: int = 1 << 16) -> Fraction:
    """Exact probability, for x uniform on ``{-k..k}^d``, that g(x) matches the target mod P."""
    if not isinstance(ps, PrimePowerSet):
        ps = PrimePowerSet(tuple(ps))
    spec.check(sys)
    if k < 0:
        raise ValueError("k must be nonnegative")
    K = 2 * k + 1
    total = K ** sys.d
    _check_budget(total, budget)
    P = ps.modulus
    target = np.array([_normalize(y, P) for y in spec.y], dtype=np.int64)
    hits = 0
    for lo in range(0, total, chunk):
        X = _grid(K, sys.d, lo, min(lo + chunk, total)) - k
        G = _gvec_mod(sys, X, P)[:, :spec.r]
        hits += int(np.all(G == target, axis=1).sum())
    return Fraction(hits, total)


def lambda_crt_box_check(sys: GcdSystem, ps: PrimePowerSet, spec: GcdTargetSpec, k: int,
                         budget: int = DEFAULT_BUDGET) -> dict:
    """Compare the box density mod P with the CRT product; equal whenever P | 2k+1."""
    if not isinstance(ps, PrimePowerSet):
        ps = PrimePowerSet(tuple(ps))
    crt = lambda_crt(sys, ps, spec, budget)
    box = lambda_box_mod(sys, ps, spec, k, budget)
    return {"crt": crt, "box": box, "divides": (2 * k + 1) % ps.modulus == 0,
            "equal": crt == box}


def sigma_p(poly: MultivariatePolynomial, p: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Fraction of ``x in (Z/p)^d`` with ``p | G(x)``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    total = p ** poly.d
    _check_budget(total, budget)
    zeros = 0
    for lo in range(0, total, 1 << 16):
        X = _grid(p, poly.d, lo, min(lo + (1 << 16), total))
        zeros += int((poly.eval_mod(X, p) == 0).sum())
    return Fraction(zeros, total)


@dataclass
class GcdGlobalResult:
    value: ErrorBoundedReal
    prime_cutoff: int
    per_prime_factors: list[tuple[int, Fraction]]
    fitted_c: float
    heuristic_tail: bool = True

    def to_json(self, digits: int = 12) -> dict:
        return {
            "value": mpmath.nstr(self.value.value, digits),
            "abs_error": mpmath.nstr(self.value.abs_error, 3),
            "prime_cutoff": self.prime_cutoff,
            "heuristic_tail": self.heuristic_tail,
            "fitted_c": self.fitted_c,
            "per_prime_factors": [[p, f"{f.numerator}/{f.denominator}"]
                                  for p, f in self.per_prime_factors],
        }


def lambda_global(sys: GcdSystem, spec: GcdTargetSpec, cutoff: int = 60,
                  budget: int = DEFAULT_BUDGET, fit_last: int = 5) -> GcdGlobalResult:
    """Truncated product of local densities with a fitted ``prod (1 - c p^-2)`` tail.

    Primes up to ``cutoff`` (and within the enumeration budget) are exact.  The
    tail is not certified: the reported error is the size of the tail
    correction itself, and ``heuristic_tail`` is always set.
    """
    spec.check(sys)
    y = 1
    for v in spec.y:
        y = y * v // math.gcd(y, v)
    special = {p: e for p, e in factorize(y)}
    factors: list[tuple[int, Fraction]] = []
    exact = Fraction(1)
    last = 1
    for p in primes_below(max(cutoff, 3) + 1):
        s = special.get(p, 0) + 1
        if (p ** s) ** sys.d > budget:
            break
        f = lambda_ps(sys, p, s, spec, budget)
        factors.append((p, f))
        exact *= f
        last = p
    if not factors:
        raise BudgetExceeded("no prime fits the enumeration budget")
    if exact == 0:
        return GcdGlobalResult(ErrorBoundedReal.exact(0), last, factors, 0.0)
    generic = [(p, f) for p, f in factors if p not in special][-fit_last:]
    cs = [float((1 - f) * p * p) for p, f in generic]
    c = max(0.0, sum(cs) / len(cs)) if cs else 0.0
    with mpmath.workprec(128):
        below = mpmath.fsum(mpmath.mpf(p) ** -2 for p in primes_below(last + 1))
        tail_sum = mpmath.primezeta(2) - below
        tail = mpmath.exp(-c * tail_sum)
        value = mpmath.mpf(exact.numerator) / exact.denominator * tail
        err = abs(value) * (1 - tail) + mpmath.mpf(2) ** -100
    return GcdGlobalResult(ErrorBoundedReal(value, err), last, factors, c)


__all__ = [
    "MultivariatePolynomial", "GcdSystem", "GcdTargetSpec", "PolynomialFormatError",
    "eval_system", "lambda_distribution", "lambda_ps", "lambda_crt", "lambda_box_mod",
    "lambda_crt_box_check", "sigma_p", "lambda_global", "GcdGlobalResult",
]

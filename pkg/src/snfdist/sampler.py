"""Seeded Monte Carlo estimates of finite-box densities.

Entries are uniform on ``{-k, ..., k}``.  Trials are split into fixed-size
chunks and chunk ``c`` draws from a Philox stream keyed by ``(seed, c)``, so
the estimate depends only on the seed and the parameters, never on how many
workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import BudgetExceeded
from .gcd import GcdSystem, GcdTargetSpec, MultivariatePolynomial, _grid
from .local import SnfPrefixSpec, worker_count
from .snf import IntegerMatrix, _det_batch, batch_determinantal, snf_integer

CHUNK = 50_000
Z95 = 1.959963984540054


@dataclass(frozen=True)
class SampleBox:
    k: int = 10 ** 6
    trials: int = 10 ** 5
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    stderr: float
    ci95_low: float
    ci95_high: float
    trials: int
    hits: int
    seed: int = 0
    k: int = 0

    @classmethod
    def from_counts(cls, hits: int, trials: int, seed: int = 0, k: int = 0) -> "Estimate":
        p = hits / trials
        stderr = math.sqrt(p * (1 - p) / trials)
        # Wilson score interval
        z2 = Z95 * Z95
        den = 1 + z2 / trials
        centre = (p + z2 / (2 * trials)) / den
        half = Z95 * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / den
        lo, hi = max(0.0, centre - half), min(1.0, centre + half)
        return cls(p, stderr, min(lo, p), max(hi, p), trials, hits, seed, k)

    def covers(self, x: float) -> bool:
        return self.ci95_low <= x <= self.ci95_high

    def to_json(self) -> dict:
        return {"p_hat": self.p_hat, "stderr": self.stderr,
                "ci95": [self.ci95_low, self.ci95_high], "trials": self.trials,
                "hits": self.hits, "seed": self.seed, "k": self.k}


# --------------------------------------------------------------------------
# events on SNF diagonals


@dataclass(frozen=True)
class FullRank:
    pass


@dataclass(frozen=True)
class DetEquals:
    c: int


@dataclass(frozen=True)
class CokernelGenerators:
    """Cokernel ``Z^n / M Z^m`` needs at most ``ell`` generators."""

    ell: int


Event = Union[SnfPrefixSpec, FullRank, DetEquals, CokernelGenerators]


def parse_event(text: str, n: int, m: int) -> Event:
    """``prefix:2,6``, ``full-rank``, ``det:0`` or ``cokernel-gens:1``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "prefix":
            return SnfPrefixSpec(tuple(int(x) for x in arg.split(",")), n, m)
        if name == "full-rank":
            return FullRank()
        if name == "det":
            if n != m:
                raise ValueError("det events need square matrices")
            return DetEquals(int(arg))
        if name == "cokernel-gens":
            return CokernelGenerators(int(arg))
    except ValueError as e:
        raise ValueError(f"bad event {text!r}: {e}") from None
    raise ValueError(f"unknown event {text!r}")


def _diagonals(A: np.ndarray) -> np.ndarray:
    D = batch_determinantal(A)
    if D is not None:
        return D
    rows = []
    for mat in A:
        rows.append(snf_integer(IntegerMatrix.from_rows(mat.tolist())).diag)
    return np.array(rows, dtype=object)


def event_hits(A: np.ndarray, event: Event) -> int:
    """Number of matrices in the batch ``A`` (shape ``(B, n, m)``) in the event."""
    B, n, m = A.shape
    if isinstance(event, DetEquals):
        if n != m:
            raise ValueError("det events need square matrices")
        if math.factorial(n) * int(np.abs(A).max(initial=1)) ** n < 2 ** 62:
            dets = _det_batch(A)
            return int((dets == event.c).sum())
        from .snf import _det
        return sum(1 for mat in A if _det(mat.tolist()) == event.c)
    D = _diagonals(A)
    if isinstance(event, SnfPrefixSpec):
        target = np.array(event.d, dtype=D.dtype)
        return int(np.all(D[:, :event.r] == target, axis=1).sum())
    if isinstance(event, FullRank):
        return int((D[:, -1] != 0).sum())
    if isinstance(event, CokernelGenerators):
        gens = (D != 1).sum(axis=1) + max(0, n - m)
        return int((gens <= event.ell).sum())
    raise TypeError(f"unsupported event {event!r}")


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK, trials - c * CHUNK)) for c in range((trials + CHUNK - 1) // CHUNK)]


def _run(job, trials: int) -> int:
    parts = _chunks(trials)
    workers = min(worker_count(), len(parts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return sum(ex.map(lambda cs: job(*cs), parts))
    return sum(job(c, size) for c, size in parts)


def sample_mu(n: int, m: int, box: SampleBox, event: Event) -> Estimate:
    """Estimate the probability of an SNF event for ``n x m`` matrices with entries in the box."""
    if n < 1 or m < 1:
        raise ValueError("matrix dimensions must be positive")
    if isinstance(event, SnfPrefixSpec) and (event.n, event.m) != (n, m):
        raise ValueError("prefix spec dimensions do not match")

    def job(chunk: int, size: int) -> int:
        A = _rng(box.seed, chunk).integers(-box.k, box.k, size=(size, n, m),
                                           endpoint=True, dtype=np.int64)
        return event_hits(A, event)

    hits = _run(job, box.trials)
    return Estimate.from_counts(hits, box.trials, box.seed, box.k)


def _gvec_exact(sys: GcdSystem, X: np.ndarray, k: int) -> np.ndarray:
    if all(f.abs_bound(k) < 2 ** 62 for f in sys.polys):
        vals = []
        for f in sys.polys:
            v = np.zeros(X.shape[0], dtype=np.int64)
            for c, e in f.terms:
                t = np.full(X.shape[0], c, dtype=np.int64)
                for j, p in enumerate(e):
                    for _ in range(p):
                        t = t * X[:, j]
                v = v + t
            vals.append(v)
        out = np.empty((X.shape[0], sys.w), dtype=np.int64)
        for j, u in enumerate(sys.subsets):
            g = np.zeros(X.shape[0], dtype=np.int64)
            for i in u:
                g = np.gcd(g, vals[i])
            out[:, j] = g
        return out
    rows = []
    for x in X.tolist():
        vals = [f(x) for f in sys.polys]
        rows.append([math.gcd(*(vals[i] for i in u)) for u in sys.subsets])
    return np.array(rows, dtype=object)


def sample_lambda(sys: GcdSystem, box: SampleBox, spec: GcdTargetSpec) -> Estimate:
    """Estimate ``P(g_i(x) = y_i, i <= r)`` for x uniform on the box."""
    spec.check(sys)
    target = np.array(spec.y)

    def job(chunk: int, size: int) -> int:
        X = _rng(box.seed, chunk).integers(-box.k, box.k, size=(size, sys.d),
                                           endpoint=True, dtype=np.int64)
        G = _gvec_exact(sys, X, box.k)[:, :spec.r]
        return int(np.all(G == target, axis=1).sum())

    hits = _run(job, box.trials)
    return Estimate.from_counts(hits, box.trials, box.seed, box.k)


def sigma_box(poly: MultivariatePolynomial, p: int, k: int, budget: int = 2 * 10 ** 6) -> Fraction:
    """Exact fraction of x in ``{-k..k}^d`` with ``p | G(x)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    K = 2 * k + 1
    total = K ** poly.d
    if total > budget:
        raise BudgetExceeded(f"{total} points exceed budget {budget}")
    hits = 0
    for lo in range(0, total, 1 << 16):
        X = _grid(K, poly.d, lo, min(lo + (1 << 16), total)) - k
        hits += int((poly.eval_mod(X, p) == 0).sum())
    return Fraction(hits, total)

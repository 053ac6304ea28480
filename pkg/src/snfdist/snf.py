"""Smith normal form over the integers and over ``Z/qZ``.

Only the diagonal is computed; the transforms are never needed.  Three
independent routes exist: Euclidean elimination over Z (:func:`snf_integer`),
elimination in ``Z/qZ`` (:func:`snf_mod`), and gcds of minors
(:func:`minors_gcd_profile`).  Vectorized batch versions back the enumeration
and sampling code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .arith import factorize
from .errors import BudgetExceeded

DEFAULT_MINOR_BUDGET = 10 ** 6


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense ``n x m`` integer matrix stored row-major."""

    n: int
    m: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("matrix dimensions must be positive")
        entries = tuple(int(x) for x in self.entries)
        if len(entries) != self.n * self.m:
            raise ValueError(f"expected {self.n * self.m} entries, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), m, tuple(x for r in rows for x in r))

    def rows(self) -> list[list[int]]:
        m = self.m
        return [list(self.entries[i * m:(i + 1) * m]) for i in range(self.n)]

    def transpose(self) -> "IntegerMatrix":
        rows = self.rows()
        return IntegerMatrix.from_rows([list(c) for c in zip(*rows)])

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "entries": list(self.entries)}


@dataclass(frozen=True)
class SnfDiagonal:
    """The ``min(n, m)`` diagonal entries of a Smith normal form."""

    n: int
    m: int
    diag: tuple[int, ...]

    def __post_init__(self):
        diag = tuple(int(x) for x in self.diag)
        if len(diag) != min(self.n, self.m):
            raise ValueError("diagonal length must be min(n, m)")
        object.__setattr__(self, "diag", diag)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)

    def is_chain(self, q: int | None = None) -> bool:
        """Check nonnegativity, zeros-last and the divisibility chain.

        Over ``Z/qZ`` the zero class is represented by 0 and behaves like q.
        """
        seen_zero = False
        prev = 1
        for d in self.diag:
            if d < 0:
                return False
            if d == 0:
                seen_zero = True
                continue
            if seen_zero or d % prev:
                return False
            prev = d
        if q is not None:
            return all(d == 0 or q % d == 0 for d in self.diag)
        return True

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "diag": list(self.diag)}


@dataclass(frozen=True)
class MinorGcdProfile:
    """``g_i`` = gcd of the ``i x i`` minors for ``i = 1..rank``."""

    g: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.g)

    def diagonal(self, n: int, m: int) -> SnfDiagonal:
        d = []
        prev = 1
        for gi in self.g:
            d.append(gi // prev)
            prev = gi
        d += [0] * (min(n, m) - len(d))
        return SnfDiagonal(n, m, tuple(d))


# --------------------------------------------------------------------------
# over Z


def _chain_repair(diag: list[int]) -> list[int]:
    """Turn a diagonal into its Smith form using gcd/lcm on pairs.

    ``diag(a, b)`` is equivalent to ``diag(gcd(a, b), lcm(a, b))`` through a
    2x2 Bezout block, so a bubble pass over pairs reaches the normal form.
    """
    nz = sorted(abs(x) for x in diag if x != 0)
    k = len(nz)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = nz[i], nz[j]
            g = math.gcd(a, b)
            nz[i], nz[j] = g, a // g * b
    return nz + [0] * (len(diag) - k)


def snf_integer(M: IntegerMatrix) -> SnfDiagonal:
    """Smith normal form diagonal over Z (nonnegative entries)."""
    A = M.rows()
    n, m = M.n, M.m
    diag: list[int] = []
    top = 0
    while top < min(n, m):
        # pivot on a smallest nonzero entry of the remaining block
        best = None
        for i in range(top, n):
            row = A[i]
            for j in range(top, m):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        A[top], A[pi] = A[pi], A[top]
        for row in A:
            row[top], row[pj] = row[pj], row[top]
        while True:
            piv = A[top][top]
            dirty = False
            for i in range(top + 1, n):
                if A[i][top]:
                    q = A[i][top] // piv
                    if q:
                        rt, ri = A[top], A[i]
                        for j in range(top, m):
                            ri[j] -= q * rt[j]
                    if A[i][top]:
                        dirty = True
            rt = A[top]
            for j in range(top + 1, m):
                if rt[j]:
                    q = rt[j] // piv
                    if q:
                        for i in range(top, n):
                            A[i][j] -= q * A[i][top]
                    if rt[j]:
                        dirty = True
            if not dirty:
                break
            # a smaller remainder appeared in the pivot row or column
            best = (abs(piv), top, top)
            for i in range(top + 1, n):
                if A[i][top] and abs(A[i][top]) < best[0]:
                    best = (abs(A[i][top]), i, top)
            for j in range(top + 1, m):
                if A[top][j] and abs(A[top][j]) < best[0]:
                    best = (abs(A[top][j]), top, j)
            _, pi, pj = best
            A[top], A[pi] = A[pi], A[top]
            for row in A:
                row[top], row[pj] = row[pj], row[top]
        diag.append(abs(A[top][top]))
        top += 1
    diag += [0] * (min(n, m) - len(diag))
    return SnfDiagonal(n, m, tuple(_chain_repair(diag)))


def _det(rows: list[list[int]]) -> int:
    """Integer determinant by fraction-free Bareiss elimination."""
    A = [list(r) for r in rows]
    k = len(A)
    sign = 1
    prev = 1
    for c in range(k - 1):
        if A[c][c] == 0:
            for r in range(c + 1, k):
                if A[r][c]:
                    A[c], A[r] = A[r], A[c]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(c + 1, k):
            for j in range(c + 1, k):
                A[r][j] = (A[r][j] * A[c][c] - A[r][c] * A[c][j]) // prev
        prev = A[c][c]
    return sign * A[k - 1][k - 1]


def minors_gcd_profile(M: IntegerMatrix, budget: int = DEFAULT_MINOR_BUDGET) -> MinorGcdProfile:
    """gcds of all ``i x i`` minors, up to the rank; an oracle for small matrices."""
    n, m = M.n, M.m
    total = sum(math.comb(n, i) * math.comb(m, i) for i in range(1, min(n, m) + 1))
    if total > budget:
        raise BudgetExceeded(f"{total} minors exceed budget {budget}")
    rows = M.rows()
    g: list[int] = []
    for i in range(1, min(n, m) + 1):
        acc = 0
        for ri in combinations(range(n), i):
            for cj in combinations(range(m), i):
                acc = math.gcd(acc, _det([[rows[a][b] for b in cj] for a in ri]))
                if acc == 1 and g and g[-1] == 1:
                    break
            if acc == 1 and g and g[-1] == 1:
                break
        if acc == 0:
            break
        g.append(acc)
    return MinorGcdProfile(tuple(g))


def normalize(diag: SnfDiagonal, q: int) -> SnfDiagonal:
    """Map each entry ``d`` to ``gcd(d, q)``, with multiples of q sent to 0."""
    out = []
    for d in diag.diag:
        g = math.gcd(d, q)
        out.append(0 if g == q else g)
    return SnfDiagonal(diag.n, diag.m, tuple(out))


# --------------------------------------------------------------------------
# over Z/qZ


def _snf_prime_power(A: list[list[int]], n: int, m: int, p: int, s: int) -> list[int]:
    """Valuations of the SNF over Z/p^s, by pivoting on a minimal-valuation entry."""
    q = p ** s
    vals = []
    top = 0
    while top < min(n, m):
        best = None
        for i in range(top, n):
            for j in range(top, m):
                x = A[i][j] % q
                if x:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if best is None or v < best[0]:
                        best = (v, i, j)
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, pi, pj = best
        A[top], A[pi] = A[pi], A[top]
        for row in A:
            row[top], row[pj] = row[pj], row[top]
        piv = A[top][top] % q
        unit = piv // p ** v
        inv = pow(unit, -1, q)
        # every entry is divisible by p^v, so the pivot clears its row and column
        for i in range(top + 1, n):
            x = A[i][top] % q
            if x:
                f = (x // p ** v) * inv % q
                A[i] = [(a - f * b) % q for a, b in zip(A[i], A[top])]
        for j in range(top + 1, m):
            x = A[top][j] % q
            if x:
                f = (x // p ** v) * inv % q
                for i in range(top, n):
                    A[i][j] = (A[i][j] - f * A[i][top]) % q
        vals.append(v)
        top += 1
    return vals


def _snf_mod_general(A: list[list[int]], n: int, m: int, q: int) -> list[int]:
    """Elimination over Z/q with Euclidean steps on representatives mod q."""
    diag = []
    top = 0
    while top < min(n, m):
        for i in range(top, n):
            A[i] = [x % q for x in A[i]]
        best = None
        for i in range(top, n):
            for j in range(top, m):
                x = A[i][j]
                if x:
                    g = math.gcd(x, q)
                    if best is None or g < best[0]:
                        best = (g, i, j)
        if best is None:
            break
        _, pi, pj = best
        A[top], A[pi] = A[pi], A[top]
        for row in A:
            row[top], row[pj] = row[pj], row[top]
        while True:
            piv = A[top][top]
            dirty = False
            for i in range(top + 1, n):
                x = A[i][top]
                if x:
                    f = x // piv
                    A[i] = [(a - f * b) % q for a, b in zip(A[i], A[top])]
                    if A[i][top]:
                        dirty = True
            for j in range(top + 1, m):
                x = A[top][j]
                if x:
                    f = x // piv
                    for i in range(top, n):
                        A[i][j] = (A[i][j] - f * A[i][top]) % q
                    if A[top][j]:
                        dirty = True
            if not dirty:
                break
            # choose the smallest nonzero representative in the pivot cross
            cands = [(A[i][top], i, top) for i in range(top, n) if A[i][top]]
            cands += [(A[top][j], top, j) for j in range(top + 1, m) if A[top][j]]
            _, pi, pj = min(cands)
            A[top], A[pi] = A[pi], A[top]
            for row in A:
                row[top], row[pj] = row[pj], row[top]
        diag.append(math.gcd(A[top][top], q))
        top += 1
    diag += [q] * (min(n, m) - len(diag))
    # gcd/lcm repair inside the divisor lattice of q
    k = len(diag)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = diag[i], diag[j]
            g = math.gcd(a, b)
            diag[i], diag[j] = g, a // g * b
    return [0 if d == q else d for d in diag]


def snf_mod(M: IntegerMatrix, q: int) -> SnfDiagonal:
    """SNF over Z/qZ with entries normalized to divisors of q (0 for the zero class)."""
    if q < 2:
        raise ValueError("modulus must be at least 2")
    A = [[x % q for x in r] for r in M.rows()]
    n, m = M.n, M.m
    f = factorize(q)
    if len(f) == 1:
        p, s = f[0]
        vals = _snf_prime_power(A, n, m, p, s)
        diag = [p ** v for v in vals] + [0] * (min(n, m) - len(vals))
    else:
        diag = _snf_mod_general(A, n, m, q)
    return SnfDiagonal(n, m, tuple(diag))


def snf_mod_batch(mats: np.ndarray, p: int, s: int) -> np.ndarray:
    """Valuation profiles of SNFs over Z/p^s for a batch of matrices.

    ``mats`` has shape ``(B, n, m)`` with entries in ``[0, p^s)``.  Returns
    ``(B, min(n, m))`` int8 valuations, with ``s`` standing for the zero class.
    """
    q = p ** s
    A = np.array(mats, dtype=np.int64) % q
    B, n, m = A.shape
    r = min(n, m)
    out = np.full((B, r), s, dtype=np.int8)
    # valuation lookup over residues
    vt = np.full(q, s, dtype=np.int64)
    for x in range(1, q):
        v, y = 0, x
        while y % p == 0:
            y //= p
            v += 1
        vt[x] = v
    inv = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        if x % p:
            inv[x] = pow(x, -1, q)
    pw = np.array([p ** v for v in range(s + 1)], dtype=np.int64)
    idx = np.arange(B)
    for top in range(r):
        sub = A[:, top:, top:]
        V = vt[sub].reshape(B, -1)
        flat = np.argmin(V, axis=1)
        vmin = V[idx, flat]
        cols = m - top
        pi = top + flat // cols
        pj = top + flat % cols
        # swap pivot into place
        row_top = A[idx, top, :].copy()
        A[idx, top, :] = A[idx, pi, :]
        A[idx, pi, :] = row_top
        col_top = A[idx, :, top].copy()
        A[idx, :, top] = A[idx, :, pj]
        A[idx, :, pj] = col_top
        live = vmin < s
        out[:, top] = np.where(live, vmin, s)
        piv = A[:, top, top]
        vv = np.minimum(vmin, s - 1)
        unit = piv // pw[vv]
        uinv = inv[unit % q]
        # clear column: row_i -= f_i * row_top, f_i = (A[i,top]/p^v) * u^-1
        f = (A[:, top + 1:, top] // pw[vv][:, None]) * uinv[:, None] % q
        f = np.where(live[:, None], f, 0)
        A[:, top + 1:, :] = (A[:, top + 1:, :] - f[:, :, None] * A[:, top:top + 1, :]) % q
        g = (A[:, top, top + 1:] // pw[vv][:, None]) * uinv[:, None] % q
        g = np.where(live[:, None], g, 0)
        A[:, :, top + 1:] = (A[:, :, top + 1:] - A[:, :, top:top + 1] * g[:, None, :]) % q
    return out


def batch_determinantal(mats: np.ndarray) -> np.ndarray | None:
    """SNF diagonals of small integer matrices from gcds of minors, vectorized.

    Returns an ``(B, min(n, m))`` int64 array, or None if some minor could
    overflow int64 (the caller then falls back to :func:`snf_integer`).
    """
    A = np.asarray(mats, dtype=np.int64)
    B, n, m = A.shape
    r = min(n, m)
    kmax = int(np.abs(A).max()) if A.size else 0
    if math.factorial(r) * max(kmax, 1) ** r >= 2 ** 63:
        return None
    g_prev = np.ones(B, dtype=np.int64)
    out = np.zeros((B, r), dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    for i in range(1, r + 1):
        gi = np.zeros(B, dtype=np.int64)
        for ri in combinations(range(n), i):
            sub = A[:, list(ri), :]
            for cj in combinations(range(m), i):
                minor = _det_batch(sub[:, :, list(cj)])
                gi = np.gcd(gi, minor)
        alive &= gi != 0
        safe = np.where(gi == 0, 1, gi)
        out[:, i - 1] = np.where(alive, safe // g_prev, 0)
        g_prev = np.where(alive, safe, g_prev)
    return out


def _det_batch(S: np.ndarray) -> np.ndarray:
    k = S.shape[1]
    if k == 1:
        return S[:, 0, 0]
    if k == 2:
        return S[:, 0, 0] * S[:, 1, 1] - S[:, 0, 1] * S[:, 1, 0]
    if k == 3:
        return (S[:, 0, 0] * (S[:, 1, 1] * S[:, 2, 2] - S[:, 1, 2] * S[:, 2, 1])
                - S[:, 0, 1] * (S[:, 1, 0] * S[:, 2, 2] - S[:, 1, 2] * S[:, 2, 0])
                + S[:, 0, 2] * (S[:, 1, 0] * S[:, 2, 1] - S[:, 1, 1] * S[:, 2, 0]))
    total = np.zeros(S.shape[0], dtype=np.int64)
    rest = list(range(1, k))
    for j in range(k):
        cols = [c for c in range(k) if c != j]
        minor = _det_batch(S[:, 1:, :][:, :, cols])
        term = S[:, 0, j] * minor
        total = total + term if j % 2 == 0 else total - term
    del rest
    return total


# --------------------------------------------------------------------------
# input formats


class MatrixFormatError(ValueError):
    """Malformed matrix input; the message carries a line/position diagnostic."""


def parse_matrix_text(text: str) -> IntegerMatrix:
    """Parse ``"n m"`` followed by n lines of m integers."""
    lines = [(k + 1, ln.strip()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, ln) for k, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("line 1: empty matrix input")
    k0, head = lines[0]
    parts = head.split()
    try:
        if len(parts) != 2:
            raise ValueError
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise MatrixFormatError(f"line {k0}: expected 'n m' header, got {head!r}") from None
    if n < 1 or m < 1:
        raise MatrixFormatError(f"line {k0}: dimensions must be positive")
    body = lines[1:]
    if len(body) != n:
        raise MatrixFormatError(f"line {k0}: header promises {n} rows, found {len(body)}")
    rows = []
    for k, ln in body:
        toks = ln.split()
        if len(toks) != m:
            raise MatrixFormatError(f"line {k}: expected {m} integers, found {len(toks)}")
        row = []
        for c, tok in enumerate(toks, 1):
            try:
                row.append(int(tok))
            except ValueError:
                raise MatrixFormatError(f"line {k}, column {c}: not an integer: {tok!r}") from None
        rows.append(row)
    return IntegerMatrix.from_rows(rows)


def parse_matrix_json(obj) -> IntegerMatrix:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise MatrixFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if isinstance(obj, list):
        # plain list of rows
        if not obj or not all(isinstance(r, list) for r in obj):
            raise MatrixFormatError("matrix JSON: expected a nonempty list of rows")
        if any(len(r) != len(obj[0]) for r in obj):
            raise MatrixFormatError("matrix JSON: rows have different lengths")
        obj = {"n": len(obj), "m": len(obj[0]), "entries": [x for r in obj for x in r]}
    try:
        n, m = int(obj["n"]), int(obj["m"])
        entries = [int(x) for x in obj["entries"]]
    except (KeyError, TypeError, ValueError) as e:
        raise MatrixFormatError(f"matrix JSON needs integer n, m and entries: {e}") from None
    if len(entries) != n * m:
        raise MatrixFormatError(f"matrix JSON: expected {n * m} entries, got {len(entries)}")
    try:
        return IntegerMatrix(n, m, tuple(entries))
    except ValueError as e:
        raise MatrixFormatError(str(e)) from None


def parse_matrix(text: str) -> IntegerMatrix:
    """Accept the text format, the JSON object form or a JSON list of rows."""
    if text.lstrip().startswith(("{", "[")):
        return parse_matrix_json(text)
    return parse_matrix_text(text)

"""Independent reference computations used only by the tests.

Nothing here imports the package: each oracle is a deliberately naive route
(brute-force minors, direct enumeration, closed forms for special cases) that
the optimized code is checked against.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from itertools import combinations, product


def det_laplace(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * det_laplace(minor)
    return total


def snf_by_minors(rows):
    """Diagonal from gcds of all i x i minors."""
    n, m = len(rows), len(rows[0])
    g = [1]
    for i in range(1, min(n, m) + 1):
        gi = 0
        for rs in combinations(range(n), i):
            for cs in combinations(range(m), i):
                gi = math.gcd(gi, det_laplace([[rows[a][b] for b in cs] for a in rs]))
        if gi == 0:
            break
        g.append(gi)
    diag = [g[i] // g[i - 1] for i in range(1, len(g))]
    return diag + [0] * (min(n, m) - len(diag))


def chain_mod(diag, p, s):
    q = p ** s
    red = [math.gcd(d, q) for d in diag]  # gcd(0, q) = q, the zero class
    return tuple(sum(1 for x in red if x % p ** i) for i in range(1, s + 1))


def brute_distribution(p, s, n, m):
    q = p ** s
    hist = {}
    for entries in product(range(q), repeat=n * m):
        rows = [list(entries[i * m:(i + 1) * m]) for i in range(n)]
        a = chain_mod(snf_by_minors(rows), p, s)
        hist[a] = hist.get(a, 0) + 1
    total = q ** (n * m)
    return {a: Fraction(c, total) for a, c in hist.items()}


def gl_order(n, p):
    return math.prod(p ** n - p ** i for i in range(n))


# closed forms for the prefix (2, 6)

def mu4_prefix_2_6(n, m):
    t = Fraction(1, 2)
    return t ** (n * m) * (1 - t ** (n * m) - t ** ((n - 1) * (m - 1)) * (1 - t ** n) * (1 - t ** m) / (1 - t))


def mu9_prefix_2_6(n, m):
    t = Fraction(1, 3)
    e = (n - 1) * (m - 1)
    return t ** e * (1 - t ** e) * (1 - t ** n) * (1 - t ** m) / (1 - t)


def mup_prefix_2_6(p, n, m):
    t = Fraction(1, p)
    return 1 - t ** (n * m) - t ** ((n - 1) * (m - 1)) * (1 - t ** n) * (1 - t ** m) / (1 - t)


def mup_prefix_2_6_expanded(p, n, m):
    t = Fraction(1, p)
    return (1 - sum(t ** i for i in range((n - 1) * (m - 1), (n - 1) * m + 1))
            + sum(t ** i for i in range(n * (m - 1) + 1, n * m)))


def gcd_all(values):
    return reduce(math.gcd, values, 0)


def brute_gcd_density(polys, d, q, target):
    """Fraction of x in (Z/q)^d with gcd(F(x), q) == target, for one gcd component."""
    hits = 0
    for x in product(range(q), repeat=d):
        g = math.gcd(gcd_all(f(x) for f in polys), q)
        if g == target:
            hits += 1
    return Fraction(hits, q ** d)

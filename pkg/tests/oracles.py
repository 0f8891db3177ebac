"""Slow, independent reference implementations.

These work on plain dicts keyed by frozensets and use itertools only, so
they share no code with the package kernels (no masks, no numpy tricks).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def subsets(ground):
    ground = sorted(ground)
    for r in range(len(ground) + 1):
        for c in itertools.combinations(ground, r):
            yield frozenset(c)


def as_dict(n, values):
    """Table indexed by mask -> dict keyed by frozenset of 1-based elements."""
    out = {}
    for m, v in enumerate(values):
        out[frozenset(i + 1 for i in range(n) if (m >> i) & 1)] = v
    return out


def to_values(n, d):
    vals = [0.0] * (1 << n)
    for s, v in d.items():
        vals[sum(1 << (e - 1) for e in s)] = v
    return vals


def omega(n):
    return frozenset(range(1, n + 1))


def global_distance(n, f):
    return max(f[a | b] + f[a & b] - f[a] - f[b] for a in subsets(omega(n)) for b in subsets(omega(n)))


def pairwise(n, f, ell, k):
    best = -math.inf
    for a in subsets(omega(n)):
        if len(a) != ell:
            continue
        for b in subsets(omega(n)):
            if len(b) != k:
                continue
            for s in range(1, n + 1):
                best = max(best, f[a | b | {s}] - f[a | b] - f[a | {s}] + f[a])
    return best


def marginal(n, f):
    return max(pairwise(n, f, ell, k) for ell in range(n) for k in range(n + 1))


def submod_violation(n, f, L, K):
    return max(sum(pairwise(n, f, ell, k) for k in range(K)) for ell in range(L + 1))


def local_pairwise(n, f, a, k):
    a = frozenset(a)
    return max(f[a | b | {s}] - f[a | b] - f[a | {s}] + f[a]
               for b in subsets(omega(n)) if len(b) == k for s in range(1, n + 1))


def local_submod_violation(n, f, coll, K):
    return max(sum(local_pairwise(n, f, a, k) for k in range(K)) for a in coll)


def phi(f, a, b):
    a, b = frozenset(a), frozenset(b)
    return (f[a | b] - f[a]) - sum(f[a | {s}] - f[a] for s in b)


def index_over(n, f, family, K):
    vals = [phi(f, a, b) for a in family for b in subsets(omega(n) - a) if 2 <= len(b) <= K]
    return max(vals) if vals else 0.0


def submodularity_index(n, f, s, K):
    return index_over(n, f, list(subsets(s)), K)


def submodularity_indicator(n, f, coll, K):
    return index_over(n, f, [frozenset(c) for c in coll], K)


def ratio_constraints(n, f, s, K):
    for a in subsets(s):
        for b in subsets(omega(n) - a):
            if len(b) <= K:
                yield f[a | b] - f[a], sum(f[a | {e}] - f[a] for e in b)


def lovasz(n, f, x):
    """Abel-summed chain formula: sum_k (x_k - x_{k+1}) f(C_k) - x_1 f({})."""
    order = sorted(range(n), key=lambda i: (-x[i], i))
    xs = [x[i] for i in order] + [0.0]
    total, chain = -xs[0] * f[frozenset()], set()
    for k, i in enumerate(order):
        chain.add(i + 1)
        total += (xs[k] - xs[k + 1]) * f[frozenset(chain)]
    return total


def multilinear(n, f, x):
    total = 0.0
    for s in subsets(omega(n)):
        p = 1.0
        for i in range(1, n + 1):
            p *= x[i - 1] if i in s else 1.0 - x[i - 1]
        total += f[s] * p
    return total


def ml_grad(n, f, x):
    """F^M is affine in each coordinate, so the partial is an exact difference."""
    out = []
    for k in range(n):
        hi, lo = list(x), list(x)
        hi[k], lo[k] = 1.0, 0.0
        out.append(multilinear(n, f, hi) - multilinear(n, f, lo))
    return out


def ml_hessian(n, f, x):
    h = [[0.0] * n for _ in range(n)]
    for k in range(n):
        for ell in range(n):
            if k == ell:
                continue
            pts = []
            for a, b in ((1, 1), (1, 0), (0, 1), (0, 0)):
                y = list(x)
                y[k], y[ell] = float(a), float(b)
                pts.append(multilinear(n, f, y))
            h[k][ell] = pts[0] - pts[1] - pts[2] + pts[3]
    return h


def convolve(n, f, g):
    out = {}
    for s in subsets(omega(n)):
        out[s] = min(f[z] + g[s - z] for z in subsets(s))
    return out


def greedy(n, f, L):
    cur, chosen, vals = frozenset(), [], []
    for _ in range(L):
        best = None
        for e in range(1, n + 1):
            if e in cur:
                continue
            gain = f[cur | {e}] - f[cur]
            if best is None or gain > best[0]:
                best = (gain, e)
        cur = cur | {best[1]}
        chosen.append(best[1])
        vals.append(f[cur])
    return chosen, vals


def opt(n, f, K):
    return max(f[s] for s in subsets(omega(n)) if len(s) <= K)


def cuflp(v, bonus, facilities):
    """Direct objective: each client takes its best open facility, plus pair bonuses."""
    s = sorted(facilities)
    if not s:
        return 0.0
    total = sum(max(row[i - 1] for i in s) for row in v)
    for (p, q), u in bonus.items():
        if p in s and q in s:
            total += u
    return total


def exact_ask(s):
    """The knapsack function with Fraction arithmetic for the linear part."""
    u = [Fraction(9)] * 4 + [Fraction(885, 100), Fraction(0)]
    lin = sum(u[i - 1] for i in s)
    wx = sum(1 for i in s if i in (5, 6))
    return float(lin) + wx ** 1.1

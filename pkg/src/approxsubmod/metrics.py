"""Exact approximate-submodularity metrics by exhaustive enumeration.

Witness triples ``(A, B, s)`` use masks for ``A`` and ``B`` and a 1-based
element for ``s``.  Ties are broken by the lexicographically smallest
``(A, B, s)``; every kernel lays its search space out in that order so that
``argmax`` returns the first maximizer.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _bits
from .errors import GroundMismatch, InvalidParams, InvalidSubset, NotNonnegative, NotSubmodular
from .setfn import DEFAULT_TOL, SetFunction, _tol, is_submodular, warn_cost

_BLOCK = 1 << 22


@dataclass(frozen=True)
class Witness:
    A: int
    B: int
    s: int | None = None

    def key(self) -> tuple:
        return (self.A, self.B, -1 if self.s is None else self.s)

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "s": self.s}


@dataclass(frozen=True)
class MetricReport:
    kind: str
    value: float
    witness: Witness | None = None
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "value": _json_float(self.value),
            "witness": None if self.witness is None else self.witness.to_json(),
            "params": self.params,
        }
        if self.details:
            out["details"] = {k: _json_float(v) if isinstance(v, float) else v
                              for k, v in self.details.items()}
        return out


def _json_float(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _as_mask(f: SetFunction, s) -> int:
    m = s if isinstance(s, (int, np.integer)) else f.mask(s)
    if not 0 <= m <= f.full:
        raise InvalidSubset(f"mask {m} out of range for n={f.n}")
    return int(m)


# -- pairwise violation kernel ---------------------------------------------------

def _pairwise_block(v: np.ndarray, n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Array ``[i, j, s]`` of f(A_i|B_j|s) - f(A_i|B_j) - f(A_i|s) + f(A_i)."""
    bits = (1 << np.arange(n, dtype=np.int64))
    ab = a[:, None] | b[None, :]
    first = v[ab[:, :, None] | bits] - v[ab][:, :, None]
    second = v[a[:, None] | bits] - v[a][:, None]
    return first - second[:, None, :]


def _argmax_pairwise(f: SetFunction, a: np.ndarray, b: np.ndarray) -> tuple[float, Witness]:
    rows = max(1, _BLOCK // max(1, len(b) * f.n))
    chunks = _bits.split(a, rows)

    def work(chunk):
        block = _pairwise_block(f.values, f.n, chunk, b)
        flat = int(np.argmax(block))
        i, j, s = np.unravel_index(flat, block.shape)
        return float(block[i, j, s]), Witness(int(chunk[i]), int(b[j]), int(s) + 1)

    best_val, best_w = -math.inf, None
    for val, w in _bits.chunked_map(work, chunks):
        if val > best_val:
            best_val, best_w = val, w
    return best_val, best_w


_TABLE_CACHE: "weakref.WeakKeyDictionary[SetFunction, dict]" = weakref.WeakKeyDictionary()


def _pair_cache(f: SetFunction) -> dict:
    return _TABLE_CACHE.setdefault(f, {})


def _check_lk(f: SetFunction, ell: int, k: int) -> None:
    if not 0 <= ell <= f.n - 1 or not 0 <= k <= f.n:
        raise InvalidParams(f"(l, k) = ({ell}, {k}) outside 0..{f.n - 1} x 0..{f.n}")


def pairwise_violation(f: SetFunction, ell: int, k: int) -> MetricReport:
    """``d^{l,k}[f]``: max over |A| = l, |B| = k and any s of the Edmonds gap.

    ``s`` ranges over the whole ground set, including elements of A or B.
    """
    _check_lk(f, ell, k)
    cache = _pair_cache(f)
    if (ell, k) not in cache:
        a = _bits.masks_of_size(f.n, ell)
        b = _bits.masks_of_size(f.n, k)
        cache[(ell, k)] = _argmax_pairwise(f, a, b)
    val, w = cache[(ell, k)]
    return MetricReport("pairwise_violation", val, w, {"l": ell, "k": k})


def pairwise_table(f: SetFunction) -> np.ndarray:
    """Matrix ``d[l, k]`` for l in 0..n-1, k in 0..n."""
    warn_cost(f.n, "pairwise_table")
    d = np.empty((f.n, f.n + 1))
    for ell in range(f.n):
        for k in range(f.n + 1):
            d[ell, k] = pairwise_violation(f, ell, k).value
    return d


def marginal_violation(f: SetFunction) -> MetricReport:
    """``D[f] = max_{l,k} d^{l,k}[f]`` (always >= 0 because d^{0,0} = 0)."""
    table = pairwise_table(f)
    best = float(table.max())
    cands = []
    for ell in range(f.n):
        for k in range(f.n + 1):
            if table[ell, k] == best:
                r = pairwise_violation(f, ell, k)
                cands.append((r.witness.key(), r.witness, ell, k))
    _, w, ell, k = min(cands, key=lambda c: c[0])
    return MetricReport("marginal_violation", best, w, {}, {"l": ell, "k": k})


def submod_violation(f: SetFunction, L: int, K: int) -> MetricReport:
    """``Delta^{L,K}[f] = max_{l <= L} sum_{k < K} d^{l,k}[f]``; per-l sums in details."""
    if not 0 <= L <= f.n - 1 or not 1 <= K <= f.n:
        raise InvalidParams(f"(L, K) = ({L}, {K}) outside 0..{f.n - 1} x 1..{f.n}")
    deltas = [sum(pairwise_violation(f, ell, k).value for k in range(K)) for ell in range(L + 1)]
    best = max(deltas)
    return MetricReport("submod_violation", float(best), None, {"L": L, "K": K},
                        {"delta": [float(x) for x in deltas], "argmax_l": deltas.index(best)})


# -- global distance ---------------------------------------------------------------

def global_distance(f: SetFunction) -> MetricReport:
    """``E[f] = max_{A,B} f(A|B) + f(A&B) - f(A) - f(B)`` over all ordered pairs."""
    warn_cost(f.n, "global_distance")
    v = f.values
    allm = np.arange(1 << f.n, dtype=np.int64)
    chunks = _bits.split(allm, max(1, _BLOCK // len(allm)))

    def work(a):
        block = v[a[:, None] | allm] + v[a[:, None] & allm] - v[a][:, None] - v[allm][None, :]
        i, j = np.unravel_index(int(np.argmax(block)), block.shape)
        return float(block[i, j]), Witness(int(a[i]), int(j))

    best_val, best_w = -math.inf, None
    for val, w in _bits.chunked_map(work, chunks):
        if val > best_val:
            best_val, best_w = val, w
    return MetricReport("global_distance", best_val, best_w)


def global_distance_plus(f: SetFunction) -> float:
    return max(0.0, global_distance(f).value)


# -- local variants ----------------------------------------------------------------

def local_pairwise_violation(f: SetFunction, a, k: int) -> MetricReport:
    """``d-hat^{A,k}[f]``: the pairwise violation with A held fixed."""
    a = _as_mask(f, a)
    if not 0 <= k <= f.n:
        raise InvalidParams(f"k = {k} outside 0..{f.n}")
    val, w = _argmax_pairwise(f, np.array([a], dtype=np.int64), _bits.masks_of_size(f.n, k))
    return MetricReport("local_pairwise_violation", val, w, {"A": a, "k": k})


def _collection(f: SetFunction, sets: Iterable) -> list[int]:
    out = [_as_mask(f, s) for s in sets]
    if not out:
        raise InvalidParams("collection must be nonempty")
    return out


def local_submod_violation(f: SetFunction, sets: Iterable, K: int) -> MetricReport:
    """``Delta-hat^{C,K}[f] = max_{A in C} sum_{k < K} d-hat^{A,k}[f]``."""
    coll = _collection(f, sets)
    if not 1 <= K <= f.n:
        raise InvalidParams(f"K = {K} outside 1..{f.n}")
    deltas = []
    for a in coll:
        deltas.append(sum(local_pairwise_violation(f, a, k).value for k in range(K)))
    best = max(deltas)
    return MetricReport("local_submod_violation", float(best), None,
                        {"C": coll, "K": K}, {"delta": [float(x) for x in deltas]})


# -- Zhou / Das style metrics ---------------------------------------------------------

def local_submod_index(f: SetFunction, a, b) -> float:
    """``phi^{A,B}[f] = [f(A|B) - f(A)] - sum_{s in B} [f(A|s) - f(A)]``."""
    a, b = _as_mask(f, a), _as_mask(f, b)
    v = f.values
    out = v[a | b] - v[a]
    for e in _bits.elements_of(b):
        out -= v[a | (1 << (e - 1))] - v[a]
    return float(out)


def _batch_gains(f: SetFunction, a: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For fixed A: candidate B masks disjoint from A, batch gain and singleton-gain sums."""
    v = f.values
    allm = np.arange(1 << f.n, dtype=np.int64)
    bs = allm[(allm & a) == 0]
    single = np.array([v[a | (1 << i)] - v[a] for i in range(f.n)])
    sums = _bits.bit_matrix(f.n)[bs].astype(float) @ single
    return bs, v[a | bs] - v[a], sums


def _index_over(f: SetFunction, sets: Sequence[int], K: int) -> float:
    pc = _bits.popcounts(f.n)
    best = -math.inf
    for a in sets:
        bs, batch, sums = _batch_gains(f, a)
        keep = (pc[bs] >= 2) & (pc[bs] <= K)
        if np.any(keep):
            best = max(best, float(np.max(batch[keep] - sums[keep])))
    return 0.0 if best == -math.inf else best


def submodularity_index(f: SetFunction, s, K: int) -> float:
    """``I^{S,K}[f]``: max phi^{A,B} over A within S, B disjoint, 2 <= |B| <= K (0 if none)."""
    s = _as_mask(f, s)
    if K < 0:
        raise InvalidParams("K must be >= 0")
    return _index_over(f, list(_bits.submasks_of(s)), K)


def submodularity_indicator(f: SetFunction, sets: Iterable, K: int) -> float:
    """``I-hat^{C,K}[f]``: as the index but with A drawn from the collection C."""
    coll = _collection(f, sets)
    if K < 0:
        raise InvalidParams("K must be >= 0")
    return _index_over(f, coll, K)


def submodularity_ratio(f: SetFunction, s, K: int, tol: float = DEFAULT_TOL) -> float:
    """Largest gamma with gamma * [f(A|B) - f(A)] <= sum_{s in B} [f(A|s) - f(A)].

    Constraints range over A within ``s``, B disjoint from A, |B| <= K.
    Returns ``inf`` when no constraint bounds gamma from above and ``-inf``
    when the feasible set of gamma is empty.  Batch gains within ``tol``
    (scaled by max |f|) of zero count as zero.
    """
    s = _as_mask(f, s)
    if K < 1:
        raise InvalidParams("K must be >= 1")
    t = _tol(f.values, tol)
    if np.any(f.values < -t):
        raise NotNonnegative("submodularity ratio needs a nonnegative function")
    pc = _bits.popcounts(f.n)
    upper, lower = math.inf, -math.inf
    for a in _bits.submasks_of(s):
        bs, batch, sums = _batch_gains(f, int(a))
        keep = pc[bs] <= K
        batch, sums = batch[keep], sums[keep]
        pos, neg = batch > t, batch < -t
        zero = ~pos & ~neg
        if np.any(zero & (sums < -t)):
            return -math.inf
        if np.any(pos):
            upper = min(upper, float(np.min(sums[pos] / batch[pos])))
        if np.any(neg):
            lower = max(lower, float(np.max(sums[neg] / batch[neg])))
    if lower > upper:
        return -math.inf
    return upper


# -- multiplicative (Horel-style) sandwich ------------------------------------------------

def region_masks(f: SetFunction, region=None) -> np.ndarray:
    """All masks, or ``{A : |A minus S| <= 1}`` when a region set S is given."""
    allm = np.arange(1 << f.n, dtype=np.int64)
    if region is None:
        return allm
    s = _as_mask(f, region)
    outside = _bits.popcounts(f.n)[allm & ~s & f.full]
    return allm[outside <= 1]


def _require_submodular(g: SetFunction) -> None:
    if not is_submodular(g):
        raise NotSubmodular("reference function must be submodular")


def verify_eps_sandwich(f: SetFunction, g: SetFunction, eps: float, region=None,
                        rtol: float = 1e-12) -> bool:
    """True iff (1 - eps) g <= f <= (1 + eps) g on the region (full power set if absent)."""
    if f.n != g.n:
        raise GroundMismatch("ground sets differ")
    if eps < 0:
        raise InvalidParams("eps must be >= 0")
    _require_submodular(g)
    m = region_masks(f, region)
    fv, gv = f.values[m], g.values[m]
    slack = rtol * np.maximum(1.0, np.abs(gv))
    return bool(np.all((1 - eps) * gv <= fv + slack) and np.all(fv <= (1 + eps) * gv + slack))


def min_eps_for_pair(f: SetFunction, g: SetFunction, region=None) -> float:
    """Smallest eps with (1 - eps) g <= f <= (1 + eps) g on the region; ``inf`` if none."""
    if f.n != g.n:
        raise GroundMismatch("ground sets differ")
    _require_submodular(g)
    m = region_masks(f, region)
    fv, gv = f.values[m], g.values[m]
    if np.any(gv < 0):
        raise InvalidParams("reference function must be nonnegative")
    zero = gv == 0
    if np.any(zero & (fv != 0)):
        return math.inf
    pos = ~zero
    if not np.any(pos):
        return 0.0
    return float(max(0.0, np.max(np.abs(fv[pos] - gv[pos]) / gv[pos])))

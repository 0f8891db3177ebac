"""Tabulated set functions over a small ground set.

A :class:`SetFunction` stores all ``2**n`` values, indexed by subset
bitmask.  Element ``i`` (1-based) is bit ``i - 1``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _bits
from ._bits import elements_of, mask_of  # noqa: F401  (re-exported)
from .errors import (
    GroundMismatch,
    InvalidGrouping,
    InvalidParams,
    InvalidSubset,
    InvalidTable,
    NotModular,
)

DEFAULT_TOL = 1e-9


class CostWarning(UserWarning):
    """An exhaustive enumeration is about to get expensive."""


def warn_cost(n: int, what: str) -> None:
    if n > _bits.COST_WARN_N:
        warnings.warn(f"{what} on n={n} enumerates ~3^n-4^n terms", CostWarning, stacklevel=3)


@dataclass(frozen=True, eq=False)
class SetFunction:
    """Immutable table ``values[mask] = f(S(mask))``.

    ``labels`` optionally records which original elements (or element
    groups) the ground set was relabeled from by a transform.
    """

    n: int
    values: np.ndarray
    labels: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        try:
            vals = np.array(self.values, dtype=float, copy=True).ravel()
        except (TypeError, ValueError) as exc:
            raise InvalidTable(f"table entries must be real numbers ({exc})") from exc
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= _bits.MAX_N:
            raise InvalidTable(f"n must be an integer in [1, {_bits.MAX_N}], got {self.n!r}")
        if vals.shape[0] != 1 << self.n:
            raise InvalidTable(f"expected {1 << self.n} values for n={self.n}, got {vals.shape[0]}")
        if not np.all(np.isfinite(vals)):
            raise InvalidTable("table contains non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "values", vals)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, s) -> float:
        return self.eval(s)

    def eval(self, s) -> float:
        """Value at a mask (int) or at an iterable of 1-based elements."""
        if not isinstance(s, (int, np.integer)):
            s = self.mask(s)
        if not 0 <= s <= self.full:
            raise InvalidSubset(f"mask {s} out of range for n={self.n}")
        return float(self.values[s])

    def mask(self, elements: Iterable[int]) -> int:
        m = 0
        for e in elements:
            if not 1 <= e <= self.n:
                raise InvalidSubset(f"element {e} not in ground set 1..{self.n}")
            m |= 1 << (e - 1)
        return m

    def equals(self, other: "SetFunction", tol: float = 0.0) -> bool:
        if self.n != other.n:
            return False
        if tol == 0.0:
            return bool(np.array_equal(self.values, other.values))
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=tol))

    def __add__(self, other: "SetFunction") -> "SetFunction":
        return add(self, other)

    def __repr__(self) -> str:
        head = ", ".join(f"{v:g}" for v in self.values[:8])
        more = ", ..." if len(self.values) > 8 else ""
        return f"SetFunction(n={self.n}, values=[{head}{more}])"


@dataclass(frozen=True)
class FunctionFlags:
    nonneg: bool
    increasing: bool
    normalized: bool
    submodular: bool


def _tol(values: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.abs(values).max()))


def from_table(n: int, values: Sequence[float]) -> SetFunction:
    return SetFunction(n, np.asarray(values, dtype=float))


def from_callable(n: int, fn: Callable[[tuple[int, ...]], float]) -> SetFunction:
    """Tabulate ``fn`` called on the sorted 1-based element tuple of each subset."""
    return SetFunction(n, [fn(elements_of(m)) for m in range(1 << n)])


def modular(weights: Sequence[float], offset: float = 0.0) -> SetFunction:
    w = np.asarray(weights, dtype=float)
    n = len(w)
    return SetFunction(n, offset + _bits.bit_matrix(n).astype(float) @ w)


def evaluate(f: SetFunction, s) -> float:
    return f.eval(s)


def is_increasing(f: SetFunction, tol: float = DEFAULT_TOL) -> bool:
    v, t = f.values, _tol(f.values, tol)
    bm = _bits.bit_matrix(f.n)
    for i in range(f.n):
        lo = np.flatnonzero(~bm[:, i])
        if np.any(v[lo | (1 << i)] < v[lo] - t):
            return False
    return True


def is_submodular(f: SetFunction, tol: float = DEFAULT_TOL) -> bool:
    """Exhaustive local check f(S+i) + f(S+j) >= f(S+i+j) + f(S) for i != j not in S.

    Equivalent to the union/intersection inequality over all pairs.
    """
    v, t = f.values, _tol(f.values, tol)
    bm = _bits.bit_matrix(f.n)
    for i in range(f.n):
        for j in range(i + 1, f.n):
            base = np.flatnonzero(~bm[:, i] & ~bm[:, j])
            bi, bj = 1 << i, 1 << j
            gap = v[base | bi] + v[base | bj] - v[base | bi | bj] - v[base]
            if np.any(gap < -t):
                return False
    return True


def is_modular(f: SetFunction, tol: float = DEFAULT_TOL) -> bool:
    """f(S) = f({}) + sum of singleton gains, for every S (same as pairwise modularity)."""
    v = f.values
    gains = np.array([v[1 << i] - v[0] for i in range(f.n)])
    pred = v[0] + _bits.bit_matrix(f.n).astype(float) @ gains
    return bool(np.all(np.abs(pred - v) <= _tol(v, tol)))


def certify_flags(f: SetFunction, tol: float = DEFAULT_TOL) -> FunctionFlags:
    t = _tol(f.values, tol)
    return FunctionFlags(
        nonneg=bool(np.all(f.values >= -t)),
        increasing=is_increasing(f, tol),
        normalized=bool(abs(f.values[0]) <= t),
        submodular=is_submodular(f, tol),
    )


# -- transforms ----------------------------------------------------------------

def complement_transform(f: SetFunction) -> SetFunction:
    masks = np.arange(1 << f.n)
    return SetFunction(f.n, f.values[f.full ^ masks])


def symmetrize_transform(f: SetFunction) -> SetFunction:
    masks = np.arange(1 << f.n)
    return SetFunction(f.n, f.values + f.values[f.full ^ masks] - f.values[f.full])


def _expand(n_new: int, blocks: list[int]) -> np.ndarray:
    """Map each mask over ``n_new`` elements to the union of the chosen ``blocks``."""
    bm = _bits.bit_matrix(n_new)
    out = np.zeros(1 << n_new, dtype=np.int64)
    for j, blk in enumerate(blocks):
        out |= np.where(bm[:, j], blk, 0)
    return out


def restrict_transform(f: SetFunction, a) -> SetFunction:
    """``f_A(S) = f(A | S)`` on the ground set minus ``A``, relabeled 1..m.

    ``labels`` of the result holds the original element of each new element.
    """
    a = a if isinstance(a, (int, np.integer)) else f.mask(a)
    if not 0 <= a <= f.full:
        raise InvalidSubset(f"mask {a} out of range")
    rest = [e for e in range(1, f.n + 1) if not (a >> (e - 1)) & 1]
    if not rest:
        raise InvalidSubset("restriction to the full ground set leaves no elements")
    idx = int(a) | _expand(len(rest), [1 << (e - 1) for e in rest])
    return SetFunction(len(rest), f.values[idx], labels=tuple(rest))


def group_transform(f: SetFunction, q: int) -> SetFunction:
    """``f_q(S) = f(union of consecutive q-blocks in S)``; ``labels`` lists each block."""
    if q < 1 or f.n % q:
        raise InvalidGrouping(f"group size {q} does not divide n={f.n}")
    m = f.n // q
    groups = [tuple(range(i * q + 1, (i + 1) * q + 1)) for i in range(m)]
    idx = _expand(m, [mask_of(g) for g in groups])
    return SetFunction(m, f.values[idx], labels=tuple(groups))


def convolve(f: SetFunction, g: SetFunction, tol: float = DEFAULT_TOL) -> SetFunction:
    """``(f * g)(S) = min over Z subset of S of f(Z) + g(S minus Z)`` for modular ``g``.

    With ``g(T) = g({}) + w(T)``, this is ``g({}) + w(S) + min_Z [f(Z) - w(Z)]``;
    the subset-min is computed by the standard O(n 2^n) sweep over bits.
    """
    _same_ground(f, g)
    if not is_modular(g, tol):
        raise NotModular("convolution requires a modular second argument")
    bm = _bits.bit_matrix(f.n).astype(float)
    w = np.array([g.values[1 << i] - g.values[0] for i in range(f.n)])
    wsum = bm @ w
    best = f.values - wsum
    for i in range(f.n):
        hi = np.flatnonzero(bm[:, i])
        best[hi] = np.minimum(best[hi], best[hi ^ (1 << i)])
    return SetFunction(f.n, g.values[0] + wsum + best)


def scale(f: SetFunction, alpha: float) -> SetFunction:
    if alpha < 0 or not math.isfinite(alpha):
        raise InvalidParams(f"scale factor must be finite and >= 0, got {alpha}")
    return SetFunction(f.n, alpha * f.values)


def add(f: SetFunction, g: SetFunction) -> SetFunction:
    _same_ground(f, g)
    return SetFunction(f.n, f.values + g.values)


def _same_ground(f: SetFunction, g: SetFunction) -> None:
    if f.n != g.n:
        raise GroundMismatch(f"ground sets differ: n={f.n} vs n={g.n}")


# -- JSON ------------------------------------------------------------------------

def to_json_dict(f: SetFunction) -> dict:
    return {"n": f.n, "values": [float(v) for v in f.values]}


def from_json_dict(data: dict) -> SetFunction:
    try:
        n, values = data["n"], data["values"]
    except (KeyError, TypeError) as exc:
        raise InvalidTable('set function JSON needs "n" and "values"') from exc
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidTable(f'"n" must be an integer, got {n!r}')
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidTable('"values" must be a list of numbers') from exc
    return SetFunction(n, arr)


def load_json(path) -> SetFunction:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidTable(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidTable(f"{path}: invalid JSON ({exc})") from exc
    return from_json_dict(data)


def save_json(f: SetFunction, path) -> None:
    Path(path).write_text(json.dumps(to_json_dict(f)))

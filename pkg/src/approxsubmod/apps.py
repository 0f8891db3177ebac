"""Built-in instances: the six-element knapsack and cooperative facility location.

Also the two experiment runners that write CSV data for the bound sweep and
the multilinear-extension slices.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _bits
from .errors import InvalidParams
from .greedy import bound_suite, fmt_float, suite_row, write_bounds_csv
from .extensions import multilinear_eval
from .metrics import min_eps_for_pair
from .polytopes import KnapsackInstance
from .setfn import SetFunction

# rows are clients, columns facilities
C4 = np.array([
    [48, 0, 0, 64, 0, 0, 0],
    [48, 0, 0, 0, 64, 0, 0],
    [48, 0, 0, 0, 0, 64, 0],
    [48, 0, 0, 0, 0, 0, 64],
    [0, 36, 0, 64, 0, 0, 0],
    [0, 36, 0, 0, 64, 0, 0],
    [0, 36, 0, 0, 0, 64, 0],
    [0, 36, 0, 0, 0, 0, 64],
    [0, 0, 27, 64, 0, 0, 0],
    [0, 0, 27, 0, 64, 0, 0],
    [0, 0, 27, 0, 0, 64, 0],
    [0, 0, 27, 0, 0, 0, 64],
], dtype=float)

PAPER_BONUS = 25.0
PAPER_T = (0.25, 0.5, 1.0, 2.0)
MULTILINEAR_BONUSES = (0.0, 4.0, 32.0, 100.0, 800.0)


# -- knapsack ------------------------------------------------------------------------------

@dataclass(frozen=True)
class AskInstance:
    u_lin: tuple = (9.0, 9.0, 9.0, 9.0, 8.85, 0.0)
    w: tuple = (0.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    p: float = 1.1
    c: tuple = (3.0, 3.0, 3.0, 3.0, 2.0, 2.0)
    b: float = 28.3

    def F(self, x) -> float:
        """u.x + (w.x)^p, with the power clamped at zero."""
        x = np.asarray(x, dtype=float)
        return float(np.dot(self.u_lin, x) + max(float(np.dot(self.w, x)), 0.0) ** self.p)


ASK = AskInstance()


def build_ask(params: AskInstance = ASK) -> KnapsackInstance:
    n = len(params.u_lin)
    bm = _bits.bit_matrix(n).astype(float)
    vals = bm @ np.asarray(params.u_lin) + np.maximum(bm @ np.asarray(params.w), 0.0) ** params.p
    return KnapsackInstance(SetFunction(n, vals), params.b, np.asarray(params.c), F=params.F)


def ask_D_bound(params: AskInstance = ASK) -> float:
    """p ||w||_1^(p-1) ||w||_inf."""
    w = np.abs(np.asarray(params.w, dtype=float))
    return float(params.p * w.sum() ** (params.p - 1) * w.max(initial=0.0))


# -- facility location --------------------------------------------------------------------

@dataclass
class CuflpInstance:
    """Cooperative UFLP.  ``v`` is clients x facilities; ``bonus`` maps 1-based
    unordered facility pairs ``(p, q)``, ``p < q``, to the unscaled reward.
    The effective reward is ``bonus / t`` (zero when ``t`` is infinite)."""

    v: np.ndarray
    demand: np.ndarray
    bonus: dict = field(default_factory=dict)
    t: float = 1.0

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.demand = np.asarray(self.demand, dtype=float)
        if not self.t > 0:
            raise InvalidParams(f"t must be positive, got {self.t}")
        if np.any(self.v < 0) or np.any(self.demand < 0):
            raise InvalidParams("revenues and demands must be nonnegative")
        clean = {}
        for (p, q), val in self.bonus.items():
            if p == q:
                raise InvalidParams("bonus on a single facility must be zero")
            if val < 0:
                raise InvalidParams("bonuses must be nonnegative")
            if not (1 <= p <= self.m and 1 <= q <= self.m):
                raise InvalidParams(f"bonus pair {(p, q)} outside 1..{self.m}")
            key = (min(p, q), max(p, q))
            clean[key] = clean.get(key, 0.0) + float(val)
        self.bonus = clean

    @property
    def m(self) -> int:
        return self.v.shape[1]

    def scaled_bonus(self) -> dict:
        if math.isinf(self.t):
            return {k: 0.0 for k in self.bonus}
        return {k: val / self.t for k, val in self.bonus.items()}

    def set_function(self) -> SetFunction:
        m = self.m
        bm = _bits.bit_matrix(m)
        vals = np.zeros(1 << m)
        # max over facilities in S, client by client; empty set stays 0
        best = np.zeros((1 << m, self.v.shape[0]))
        for i in range(m):
            hi = np.flatnonzero(bm[:, i])
            best[hi] = np.maximum(best[hi], self.v[:, i])
        vals = best @ self.demand
        for (p, q), val in self.scaled_bonus().items():
            vals = vals + np.where(bm[:, p - 1] & bm[:, q - 1], val, 0.0)
        return SetFunction(m, vals)


def build_cuflp(t: float = 1.0, bonus: float = PAPER_BONUS) -> tuple[CuflpInstance, SetFunction]:
    """The C4 instance with one bonus on facilities {6, 7}; ``t = inf`` drops it."""
    if not t > 0:
        raise InvalidParams(f"t must be positive, got {t}")
    inst = CuflpInstance(C4, np.ones(C4.shape[0]), {(6, 7): bonus}, t)
    return inst, inst.set_function()


def cuflp_base(inst: CuflpInstance) -> SetFunction:
    """The bonus-free UFLP objective of the same instance."""
    return CuflpInstance(inst.v, inst.demand, {}, 1.0).set_function()


def cuflp_near_bound(inst: CuflpInstance) -> float:
    """D' = |supp(u)| max u over unordered pairs, using the scaled bonuses."""
    u = [val for val in inst.scaled_bonus().values() if val > 0]
    return float(len(u) * max(u)) if u else 0.0


def cuflp_lovasz_budget(inst: CuflpInstance) -> float:
    return inst.m * cuflp_near_bound(inst)


# -- experiments ---------------------------------------------------------------------------

def experiment_bounds(t_list: Iterable[float] = PAPER_T, K_range: Iterable[int] = range(1, 8),
                      out=None, bonus: float = PAPER_BONUS) -> list:
    """Bound suite at K = L for each t; eps compares h^t with the bonus-free f globally."""
    results, rows = [], []
    for t in t_list:
        inst, h = build_cuflp(t, bonus)
        f = cuflp_base(inst)
        eps = min_eps_for_pair(h, f)
        for K in K_range:
            res = bound_suite(h, K, K, g=f, eps=eps if 0 < eps < 1 else None)
            results.append((t, res))
            rows.append(suite_row(res, t))
    if out is not None:
        write_bounds_csv(rows, out)
    return results


def _write(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def multilinear_base_point(m: int = 7) -> np.ndarray:
    x = np.zeros(m)
    x[:2] = 1.0
    return x


def multilinear_grid(h: SetFunction, grid: int) -> list[tuple[float, float, float]]:
    """F^M at x1 = x2 = 1 with (x6, x7) on a grid of [0, 1]^2, other coordinates 0."""
    ts = np.linspace(0.0, 1.0, grid)
    out = []
    for a in ts:
        for b in ts:
            x = multilinear_base_point(h.n)
            x[5], x[6] = a, b
            out.append((float(a), float(b), multilinear_eval(h, x)))
    return out


def multilinear_slice(h: SetFunction, grid: int) -> list[tuple[float, float]]:
    """F^M along the base point plus lambda (e6 + e7)."""
    out = []
    for lam in np.linspace(0.0, 1.0, grid):
        x = multilinear_base_point(h.n)
        x[5] = x[6] = lam
        out.append((float(lam), multilinear_eval(h, x)))
    return out


def experiment_multilinear(bonuses: Iterable[float] = MULTILINEAR_BONUSES, grid: int = 21,
                           out=None) -> dict:
    """Grid and diagonal-slice data per bonus; files go under directory ``out`` if given."""
    if grid < 2:
        raise InvalidParams("grid needs at least 2 points per axis")
    data = {}
    outdir = None if out is None else Path(out)
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    for bonus in bonuses:
        _, h = build_cuflp(1.0, bonus)
        g, s = multilinear_grid(h, grid), multilinear_slice(h, grid)
        data[bonus] = {"grid": g, "slice": s}
        if outdir is not None:
            tag = fmt_float(bonus)
            _write(outdir / f"multilinear_grid_bonus{tag}.csv", ("x6", "x7", "value"),
                   ([fmt_float(a), fmt_float(b), fmt_float(v)] for a, b, v in g))
            _write(outdir / f"multilinear_slice_bonus{tag}.csv", ("lambda", "value"),
                   ([fmt_float(a), fmt_float(v)] for a, v in s))
    return data


def second_differences(values: Sequence[float]) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v[2:] - 2 * v[1:-1] + v[:-2]

"""Continuous extensions of set functions to the unit hypercube.

Lovasz extension, the greedy vertex vectors Gamma(f), the convex closure as
an LP over distributions on subsets, and the multilinear extension with
closed-form gradient and Hessian.  The ``*_check`` functions certify the
approximation bounds that tie these extensions to the marginal violation
``D[f]`` and raise on any violation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _bits, _simplex
from .errors import (
    BoundViolation,
    GroundMismatch,
    InvalidPerm,
    InvalidPoint,
    LpError,
    NotNormalized,
    SandwichViolation,
    TooLarge,
)
from .metrics import marginal_violation
from .setfn import SetFunction, is_submodular

POINT_TOL = 1e-12
MAX_PERM_N = 8
MAX_LP_N = 10


def as_point(x, n: int) -> np.ndarray:
    """Validate a hypercube point, clipping round-off within ``POINT_TOL``."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != (n,):
        raise InvalidPoint(f"expected {n} coordinates, got {x.shape[0]}")
    if not np.all(np.isfinite(x)) or np.any(x < -POINT_TOL) or np.any(x > 1 + POINT_TOL):
        raise InvalidPoint("point must lie in [0, 1]^n")
    return np.clip(x, 0.0, 1.0)


def vertex(f: SetFunction, s: int) -> np.ndarray:
    return _bits.bit_matrix(f.n)[s].astype(float)


# -- Lovasz extension -------------------------------------------------------------

def ranking(x: np.ndarray) -> np.ndarray:
    """0-based indices sorting ``x`` descending; ties by ascending index."""
    return np.argsort(-x, kind="stable")


def lovasz_eval(f: SetFunction, x) -> float:
    """sum_k x_{pi_k} [f(C_k) - f(C_{k-1})] along the descending-coordinate chain."""
    x = as_point(x, f.n)
    v = f.values
    total, prev = 0.0, 0
    for i in ranking(x):
        cur = prev | (1 << int(i))
        total += x[i] * (v[cur] - v[prev])
        prev = cur
    return float(total)


@dataclass(frozen=True)
class GammaVector:
    gamma: np.ndarray
    perm: tuple[int, ...]

    def check(self, f: SetFunction, tol: float = 0.0) -> bool:
        """Recompute the marginals along ``perm`` and compare."""
        ref = gamma_of_perm(f, self.perm).gamma
        return bool(np.all(np.abs(ref - np.asarray(self.gamma)) <= tol))


def _check_perm(perm: Sequence[int], elems: Iterable[int]) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != sorted(elems):
        raise InvalidPerm(f"{perm} is not a permutation of {sorted(elems)}")
    return perm


def gamma_of_perm(f: SetFunction, perm: Sequence[int]) -> GammaVector:
    """gamma_{pi_i} = f(S_i) - f(S_{i-1}) along the chain of ``perm`` (1-based)."""
    perm = _check_perm(perm, range(1, f.n + 1))
    gamma = np.zeros(f.n)
    prev = 0
    for e in perm:
        cur = prev | (1 << (e - 1))
        gamma[e - 1] = f.values[cur] - f.values[prev]
        prev = cur
    return GammaVector(gamma, perm)


def gamma_vertices(f: SetFunction) -> list[GammaVector]:
    if f.n > MAX_PERM_N:
        raise TooLarge(f"n! enumeration capped at n={MAX_PERM_N}")
    return [gamma_of_perm(f, p) for p in itertools.permutations(range(1, f.n + 1))]


def lovasz_as_gamma_max(f: SetFunction, x) -> float:
    x = as_point(x, f.n)
    return float(max(gv.gamma @ x for gv in gamma_vertices(f)))


def lovasz_sup_distance(f: SetFunction, g: SetFunction) -> float:
    """sup-norm distance of the two Lovasz extensions, attained at a vertex."""
    if f.n != g.n:
        raise GroundMismatch("ground sets differ")
    return float(np.max(np.abs(f.values - g.values)))


def lovasz_midpoint_violation(f: SetFunction, s: int, t: int) -> float:
    """Convexity violation of F^L at the midpoint of x(S) and x(T)."""
    xs, xt = vertex(f, s), vertex(f, t)
    return lovasz_eval(f, 0.5 * (xs + xt)) - 0.5 * (lovasz_eval(f, xs) + lovasz_eval(f, xt))


# -- convex closure ---------------------------------------------------------------

@dataclass
class LpSolution:
    objective: float
    y: np.ndarray
    status: str


def convex_closure_eval(f: SetFunction, x, tol: float = 1e-9) -> LpSolution:
    """min sum_S f(S) y(S) over distributions y on subsets with marginals x."""
    if f.n > MAX_LP_N:
        raise TooLarge(f"closure LP capped at n={MAX_LP_N}")
    if f.values[0] != 0:
        raise NotNormalized("convex closure LP requires f(empty) = 0")
    x = as_point(x, f.n)
    a = np.vstack([_bits.bit_matrix(f.n).T.astype(float), np.ones(1 << f.n)])
    b = np.append(x, 1.0)
    res = _simplex.solve(f.values, a, b)
    if res.status != "optimal":
        return LpSolution(math.nan, res.x, res.status)
    y = np.maximum(res.x, 0.0)
    if abs(y.sum() - 1.0) > tol or np.any(np.abs(a[:-1] @ y - x) > tol):
        raise LpError("simplex solution violates the marginal constraints")
    return LpSolution(float(f.values @ y), y, "optimal")


@dataclass
class SandwichReport:
    max_gap: float
    budget: float
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"max_gap": self.max_gap, "budget": self.budget, "pass": self.passed,
                "witnesses": [list(map(float, w)) for w in self.witnesses]}


def sandwich_check(f: SetFunction, xs, tol: float = 1e-7, d_value: float | None = None,
                   strict: bool = True) -> SandwichReport:
    """Check F^L(x) >= F^C(x) >= F^L(x) - n D[f] at each point.

    ``max_gap`` is the largest F^L - F^C seen; its point is the witness.
    Raises :class:`SandwichViolation` when ``strict`` and a point fails.
    """
    d = marginal_violation(f).value if d_value is None else d_value
    budget = f.n * d
    max_gap, wit, ok = -math.inf, None, True
    for x in xs:
        x = as_point(x, f.n)
        fl = lovasz_eval(f, x)
        fc = convex_closure_eval(f, x).objective
        gap = fl - fc
        if gap < -tol or gap > budget + tol:
            ok = False
            if strict:
                raise SandwichViolation(f"gap {gap} outside [0, {budget}] at x={x.tolist()}")
        if gap > max_gap:
            max_gap, wit = gap, x
    return SandwichReport(float(max_gap), float(budget), ok, [] if wit is None else [wit])


# -- multilinear extension ------------------------------------------------------------

def _weights(n: int, x: np.ndarray, skip: Sequence[int] = ()) -> np.ndarray:
    """prod_{i in S} x_i prod_{i not in S} (1 - x_i) over all masks, ignoring ``skip``."""
    bm = _bits.bit_matrix(n)
    w = np.ones(1 << n)
    for i in range(n):
        if i in skip:
            continue
        w *= np.where(bm[:, i], x[i], 1.0 - x[i])
    return w


def multilinear_eval(f: SetFunction, x) -> float:
    x = as_point(x, f.n)
    return _ml_raw(f, x)


def _ml_raw(f: SetFunction, x: np.ndarray) -> float:
    return float(f.values @ _weights(f.n, x))


def _ml_batch(f: SetFunction, xs: np.ndarray) -> np.ndarray:
    bm = _bits.bit_matrix(f.n)
    out = np.empty(len(xs))
    for lo in range(0, len(xs), 4096):
        blk = xs[lo:lo + 4096]
        w = np.ones((len(blk), 1 << f.n))
        for i in range(f.n):
            col = blk[:, i:i + 1]
            w *= np.where(bm[:, i], col, 1.0 - col)
        out[lo:lo + len(blk)] = w @ f.values
    return out


def _ml_grad_raw(f: SetFunction, x: np.ndarray) -> np.ndarray:
    v, bm = f.values, _bits.bit_matrix(f.n)
    g = np.empty(f.n)
    for k in range(f.n):
        w = _weights(f.n, x, skip=(k,))
        lo = np.flatnonzero(~bm[:, k])
        g[k] = (v[lo | (1 << k)] - v[lo]) @ w[lo]
    return g


def _ml_hess_raw(f: SetFunction, x: np.ndarray) -> np.ndarray:
    v, bm, n = f.values, _bits.bit_matrix(f.n), f.n
    h = np.zeros((n, n))
    for k in range(n):
        for ell in range(k + 1, n):
            w = _weights(n, x, skip=(k, ell))
            lo = np.flatnonzero(~bm[:, k] & ~bm[:, ell])
            bk, bl = 1 << k, 1 << ell
            h[k, ell] = h[ell, k] = (v[lo | bk | bl] - v[lo | bk] - v[lo | bl] + v[lo]) @ w[lo]
    return h


def multilinear_grad(f: SetFunction, x) -> np.ndarray:
    return _ml_grad_raw(f, as_point(x, f.n))


def multilinear_hessian(f: SetFunction, x) -> np.ndarray:
    """Closed-form Hessian; the diagonal is identically zero (F^M is multilinear)."""
    return _ml_hess_raw(f, as_point(x, f.n))


def _rel_err(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a)), initial=0.0))


def grad_fd_error(f: SetFunction, x, step: float = 1e-5) -> float:
    """Relative (floor 1) error of the closed-form gradient vs central differences of F^M."""
    x = as_point(x, f.n)
    fd = np.empty(f.n)
    for k in range(f.n):
        e = np.zeros(f.n)
        e[k] = step
        fd[k] = (_ml_raw(f, x + e) - _ml_raw(f, x - e)) / (2 * step)
    return _rel_err(_ml_grad_raw(f, x), fd)


def hessian_fd_error(f: SetFunction, x, step: float = 1e-5) -> float:
    """Relative (floor 1) error of the closed-form Hessian vs central differences.

    Differences are taken on the closed-form gradient; F^M is a polynomial so
    evaluation just outside the cube is well defined.
    """
    x = as_point(x, f.n)
    fd = np.empty((f.n, f.n))
    for ell in range(f.n):
        e = np.zeros(f.n)
        e[ell] = step
        fd[:, ell] = (_ml_grad_raw(f, x + e) - _ml_grad_raw(f, x - e)) / (2 * step)
    return _rel_err(_ml_hess_raw(f, x), fd)


@dataclass
class HessianReport:
    max_offdiag: float
    bound: float
    max_abs_diag: float
    fd_max_rel_err: float
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"max_gap": self.max_offdiag, "budget": self.bound, "pass": self.passed,
                "max_abs_diag": self.max_abs_diag, "fd_max_rel_err": self.fd_max_rel_err,
                "witnesses": [list(map(float, w)) for w in self.witnesses]}


def hessian_bound_check(f: SetFunction, xs, d_value: float | None = None, step: float = 1e-5,
                        fd_rtol: float = 1e-5, strict: bool = True) -> HessianReport:
    """Off-diagonal Hessian entries <= 2^(n-3) D[f]; diagonal exactly zero; FD agreement.

    ``d_value`` substitutes any upper bound on D[f] for the exact value.
    """
    d = marginal_violation(f).value if d_value is None else d_value
    bound = 2.0 ** (f.n - 3) * d
    off_max, diag_max, fd_max, wit = -math.inf, 0.0, 0.0, None
    for x in xs:
        x = as_point(x, f.n)
        h = _ml_hess_raw(f, x)
        off = h[~np.eye(f.n, dtype=bool)]
        top = float(off.max()) if off.size else 0.0
        if top > off_max:
            off_max, wit = top, x
        diag_max = max(diag_max, float(np.abs(np.diag(h)).max()))
        fd_max = max(fd_max, hessian_fd_error(f, x, step), grad_fd_error(f, x, step))
    if off_max == -math.inf:
        off_max = 0.0
    ok = off_max <= bound + 1e-9 and diag_max == 0.0 and fd_max <= fd_rtol
    if strict and not ok:
        raise BoundViolation(
            f"hessian check failed: max off-diagonal {off_max} vs bound {bound}, "
            f"|diag| {diag_max}, fd error {fd_max}")
    return HessianReport(off_max, bound, diag_max, fd_max, ok, [] if wit is None else [wit])


def upconcavity_budget(n: int, d_value: float) -> float:
    """n (n^{3/2} - 1) 2^{n-4} D."""
    return n * (n ** 1.5 - 1) * 2.0 ** (n - 4) * d_value


def _sample_lines(n: int, trials: int, seed: int):
    # PCG64 via numpy's default_rng; the draw order below is part of the contract
    rng = np.random.default_rng(seed)
    x = rng.random((trials, n))
    u = rng.random((trials, n))
    u = np.maximum(u, 1e-12)
    tmin = np.max(-x / u, axis=1)
    tmax = np.min((1.0 - x) / u, axis=1)
    t1 = tmin + (tmax - tmin) * rng.random(trials)
    t2 = tmin + (tmax - tmin) * rng.random(trials)
    lam = rng.random(trials)
    return x, u, t1, t2, lam


def upconcavity_samples(f: SetFunction, trials: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial violations lam G(t1) + (1 - lam) G(t2) - G(lam t1 + (1 - lam) t2).

    G(t) = F^M(x + t u) with u >= 0; t1, t2 drawn so every point stays in the cube.
    Returns ``(violations, points)`` where points are the interior evaluation points.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x, u, t1, t2, lam = _sample_lines(f.n, trials, seed)
    tm = lam * t1 + (1 - lam) * t2
    pts = np.concatenate([x + t1[:, None] * u, x + t2[:, None] * u, x + tm[:, None] * u])
    vals = _ml_batch(f, pts).reshape(3, trials)
    viol = lam * vals[0] + (1 - lam) * vals[1] - vals[2]
    return viol, pts[2 * trials:]


def upconcavity_violation_sample(f: SetFunction, trials: int, seed: int) -> float:
    """Largest sampled epsilon-up-concavity violation of F^M along nonnegative directions."""
    viol, _ = upconcavity_samples(f, trials, seed)
    return float(viol.max())


def upconcavity_check(f: SetFunction, trials: int, seed: int, d_value: float | None = None,
                      strict: bool = True) -> SandwichReport:
    d = marginal_violation(f).value if d_value is None else d_value
    budget = upconcavity_budget(f.n, d)
    viol, pts = upconcavity_samples(f, trials, seed)
    i = int(np.argmax(viol))
    ok = bool(viol[i] <= budget + 1e-9)
    if strict and not ok:
        raise BoundViolation(f"up-concavity violation {viol[i]} exceeds budget {budget}")
    return SandwichReport(float(viol[i]), float(budget), ok, [pts[i]])


def is_certified_submodular(f: SetFunction) -> bool:
    return is_submodular(f)

"""Valid inequalities for approximately submodular knapsack and epigraph sets.

A :class:`LinearCut` reads ``coeffs . x - z_coeff * z <= rhs``.  Every cut is
certified by enumerating all integer points, whether or not the sufficient
condition for validity holds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _bits
from .errors import (
    Infeasible,
    InvalidParams,
    InvalidPerm,
    InvalidTable,
    NotACover,
    NotInGamma,
    NotNonnegative,
)
from .extensions import GammaVector, as_point, lovasz_eval
from .metrics import marginal_violation
from .setfn import SetFunction, _tol, from_json_dict, is_increasing

CUT_TOL = 1e-9


@dataclass
class Certificate:
    checked_points: int
    valid: bool
    max_violation: float

    def to_json(self) -> dict:
        return {"checked_points": self.checked_points, "valid": self.valid,
                "max_violation": self.max_violation}


@dataclass
class LinearCut:
    coeffs: np.ndarray
    rhs: float
    z_coeff: float
    provenance: str
    certificate: Certificate
    guarantee: bool | None = None
    details: dict = field(default_factory=dict)

    def lhs(self, x, z: float = 0.0) -> float:
        return float(np.asarray(x, dtype=float) @ self.coeffs - self.z_coeff * z)

    def violated_by(self, x, z: float = 0.0, tol: float = CUT_TOL) -> bool:
        return self.lhs(x, z) > self.rhs + tol

    def to_json(self) -> dict:
        out = {"coeffs": [float(c) for c in self.coeffs], "rhs": float(self.rhs),
               "z_coeff": float(self.z_coeff), "provenance": self.provenance,
               "guarantee": self.guarantee, "certificate": self.certificate.to_json()}
        if self.details:
            out["details"] = self.details
        return out


# -- knapsack ------------------------------------------------------------------------------

@dataclass
class KnapsackInstance:
    """``max c.x`` subject to ``f(S(x)) <= b``; ``F`` optionally extends f to the cube."""

    f: SetFunction
    b: float
    c: np.ndarray
    F: Callable[[np.ndarray], float] | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        if self.c.shape != (self.f.n,):
            raise InvalidParams(f"c needs {self.f.n} entries")
        if np.any(self.f.values < -_tol(self.f.values, 1e-9)):
            raise NotNonnegative("knapsack function must be nonnegative")
        if not is_increasing(self.f):
            raise InvalidParams("knapsack function must be increasing")

    @property
    def n(self) -> int:
        return self.f.n

    def continuous(self, x) -> float:
        x = as_point(x, self.n)
        return float(self.F(x)) if self.F is not None else lovasz_eval(self.f, x)


def is_cover(f: SetFunction, s, b: float) -> bool:
    return f.eval(s) > b


def is_minimal_cover(f: SetFunction, s, b: float) -> bool:
    s = s if isinstance(s, (int, np.integer)) else f.mask(s)
    if not is_cover(f, s, b):
        return False
    return all(f.values[s & ~(1 << (e - 1))] <= b for e in _bits.elements_of(s))


def _as_mask(f: SetFunction, s) -> int:
    return int(s) if isinstance(s, (int, np.integer)) else f.mask(s)


def _extension_gains(f: SetFunction, s: int, perm: Sequence[int]) -> tuple[list[int], list[float]]:
    outside = [e for e in range(1, f.n + 1) if not s >> (e - 1) & 1]
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != outside:
        raise InvalidPerm(f"{perm} is not a permutation of {outside}")
    gains, cur = [], s
    for e in perm:
        nxt = cur | (1 << (e - 1))
        gains.append(float(f.values[nxt] - f.values[cur]))
        cur = nxt
    return list(perm), gains


def set_extension(f: SetFunction, s, perm: Sequence[int]) -> int:
    """``S`` plus each ``pi_j`` whose chain gain is at least every singleton value in S."""
    s = _as_mask(f, s)
    perm, gains = _extension_gains(f, s, perm)
    thresh = max((f.values[1 << (e - 1)] for e in _bits.elements_of(s)), default=-math.inf)
    u = 0
    for e, g in zip(perm, gains):
        if g >= thresh:
            u |= 1 << (e - 1)
    return s | u


def _feasible_masks(f: SetFunction, b: float) -> np.ndarray:
    return np.flatnonzero(f.values <= b)


def certify_knapsack_cut(f: SetFunction, b: float, coeffs: np.ndarray, rhs: float) -> Certificate:
    feas = _feasible_masks(f, b)
    lhs = _bits.bit_matrix(f.n)[feas].astype(float) @ coeffs
    worst = float(np.max(lhs - rhs, initial=-math.inf))
    return Certificate(int(len(feas)), bool(worst <= CUT_TOL), worst)


def facet_witnesses(f: SetFunction, s: int, ext: int, b: float) -> dict:
    """For each s in U, a pair t != u in S with f(S + s - t - u) <= b (or None)."""
    out = {}
    members = _bits.elements_of(s)
    for e in _bits.elements_of(ext & ~s):
        found = None
        for i, t in enumerate(members):
            for u in members[i + 1:]:
                m = (s | (1 << (e - 1))) & ~(1 << (t - 1)) & ~(1 << (u - 1))
                if f.values[m] <= b:
                    found = [t, u]
                    break
            if found:
                break
        out[e] = found
    return out


def extended_cover_cut(f: SetFunction, s, perm: Sequence[int], b: float, d_bound: float) -> LinearCut:
    """sum_{E_pi(S)} x <= |S| - 1, certified by enumeration.

    ``guarantee`` records the sufficient condition ``f(S) > n d_bound + b``;
    ``details`` holds the facet-condition witnesses.
    """
    s = _as_mask(f, s)
    if not is_cover(f, s, b):
        raise NotACover(f"f(S) = {f.eval(s)} does not exceed b = {b}")
    ext = set_extension(f, s, perm)
    coeffs = _bits.bit_matrix(f.n)[ext].astype(float)
    rhs = float(_bits.popcount(s) - 1)
    guarantee = bool(f.eval(s) > f.n * d_bound + b)
    wits = facet_witnesses(f, s, ext, b)
    minimal = is_minimal_cover(f, s, b)
    details = {"cover": list(_bits.elements_of(s)), "extension": list(_bits.elements_of(ext)),
               "d_bound": float(d_bound), "minimal": minimal,
               "facet_witnesses": {str(k): v for k, v in wits.items()},
               "facet_condition": bool(minimal and all(v is not None for v in wits.values()))}
    cert = certify_knapsack_cut(f, b, coeffs, rhs)
    return LinearCut(coeffs, rhs, 0.0, "extended_cover", cert, guarantee, details)


def knapsack_brute_force(inst: KnapsackInstance) -> tuple[int, float]:
    """Best feasible ``c.x`` over all binary x; ties go to the smallest mask."""
    feas = _feasible_masks(inst.f, inst.b)
    if feas.size == 0:
        raise Infeasible("no binary point satisfies f(S) <= b")
    obj = _bits.bit_matrix(inst.n)[feas].astype(float) @ inst.c
    i = int(np.argmax(obj))
    return int(feas[i]), float(obj[i])


@dataclass
class PointReport:
    F_value: float
    feasible: bool
    objective: float
    violated: list
    lhs: list

    def to_json(self) -> dict:
        return {"F": self.F_value, "feasible": self.feasible, "objective": self.objective,
                "violated": self.violated, "lhs": self.lhs}


def point_checks(inst: KnapsackInstance, x, cuts: Sequence[LinearCut] = ()) -> PointReport:
    x = as_point(x, inst.n)
    fx = inst.continuous(x)
    lhs = [c.lhs(x) for c in cuts]
    violated = [i for i, c in enumerate(cuts) if c.violated_by(x)]
    return PointReport(fx, bool(fx <= inst.b + CUT_TOL), float(inst.c @ x), violated, lhs)


def trivial_facet_predicates(inst: KnapsackInstance) -> dict:
    """Full dimensionality and the facet conditions for the variable bounds."""
    f, b = inst.f, inst.b
    single = [f.values[1 << i] for i in range(f.n)]
    full_dim = bool(all(v <= b for v in single))
    upper = []
    for s in range(1, f.n + 1):
        if all(f.values[(1 << (s - 1)) | (1 << (t - 1))] <= b for t in range(1, f.n + 1) if t != s):
            upper.append(s)
    return {"full_dimensional": full_dim,
            "lower_bound_facets": list(range(1, f.n + 1)) if full_dim else [],
            "upper_bound_facets": upper}


# -- epigraph ------------------------------------------------------------------------------

@dataclass
class EpigraphInstance:
    """``z >= phi(sigma + c.x)`` over binary x.

    ``kind`` is ``"power"`` (needs ``p``), ``"sqrt"``, or ``"table"`` (piecewise
    linear through ``grid`` and ``values``).
    """

    kind: str
    c: np.ndarray
    sigma: float = 0.0
    p: float | None = None
    grid: Sequence[float] | None = None
    values: Sequence[float] | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        if np.any(self.c < 0) or self.sigma < 0:
            raise InvalidParams("c and sigma must be nonnegative")
        if self.kind == "power":
            if self.p is None or self.p <= 0:
                raise InvalidParams("power phi needs p > 0")
        elif self.kind == "table":
            g, v = np.asarray(self.grid, float), np.asarray(self.values, float)
            if g.ndim != 1 or g.shape != v.shape or g.size < 2 or np.any(np.diff(g) <= 0):
                raise InvalidParams("table phi needs a strictly increasing grid with matching values")
            if np.any(np.diff(v) < 0):
                raise InvalidParams("phi must be increasing")
        elif self.kind != "sqrt":
            raise InvalidParams(f"unknown phi kind {self.kind!r}")

    @property
    def n(self) -> int:
        return len(self.c)

    def phi(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "power":
            return np.maximum(z, 0.0) ** self.p
        if self.kind == "sqrt":
            return np.sqrt(np.maximum(z, 0.0))
        return np.interp(z, self.grid, self.values)

    def f_sigma(self) -> SetFunction:
        bm = _bits.bit_matrix(self.n).astype(float)
        return SetFunction(self.n, self.phi(self.sigma + bm @ self.c))

    def g_sigma(self) -> SetFunction:
        f = self.f_sigma()
        return SetFunction(self.n, f.values - float(self.phi(self.sigma)))


def epigraph_cut(inst: EpigraphInstance, gamma: GammaVector, d_bound: float | None = None) -> LinearCut:
    """sum gamma_s x_s - z <= n d_bound - phi(sigma), for gamma in Gamma(g_sigma)."""
    g = inst.g_sigma()
    if not gamma.check(g, tol=1e-12 * max(1.0, float(np.abs(g.values).max()))):
        raise NotInGamma(f"gamma does not match the chain of perm {gamma.perm}")
    if d_bound is None:
        d_bound = marginal_violation(g).value
    coeffs = np.asarray(gamma.gamma, dtype=float)
    phi0 = float(inst.phi(inst.sigma))
    rhs = inst.n * d_bound - phi0
    # the tightest z at each binary x is z = F_sigma(x)
    z = inst.f_sigma().values
    lhs = _bits.bit_matrix(inst.n).astype(float) @ coeffs - z
    worst = float(np.max(lhs - rhs))
    cert = Certificate(1 << inst.n, bool(worst <= CUT_TOL), worst)
    return LinearCut(coeffs, rhs, 1.0, "epigraph", cert, None,
                     {"perm": list(gamma.perm), "d_bound": float(d_bound), "phi_sigma": phi0})


def pf_membership(f: SetFunction, gamma, tol: float = 0.0) -> bool:
    """gamma(S) <= f(S) for every S."""
    g = _bits.bit_matrix(f.n).astype(float) @ np.asarray(gamma, dtype=float)
    return bool(np.all(g <= f.values + tol))


def gamma_slack_check(f: SetFunction, gamma, d_value: float | None = None) -> float:
    """min over S of f(S) + |S| D[f] - gamma(S); nonnegative for every gamma in Gamma(f)."""
    if isinstance(gamma, GammaVector):
        gamma = gamma.gamma
    d = marginal_violation(f).value if d_value is None else d_value
    bm = _bits.bit_matrix(f.n).astype(float)
    slack = f.values + _bits.popcounts(f.n) * d - bm @ np.asarray(gamma, dtype=float)
    return float(slack.min())


# -- JSON ----------------------------------------------------------------------------------

def load_instance(path):
    """Knapsack ``{n, values, b, c}`` or epigraph ``{phi: {kind, p}, c, sigma}`` JSON."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidTable(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidTable(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidTable("instance JSON must be an object")
    try:
        if "phi" in data:
            phi = data["phi"]
            return EpigraphInstance(phi["kind"], data["c"], float(data.get("sigma", 0.0)),
                                    p=phi.get("p"), grid=phi.get("grid"), values=phi.get("values"))
        return KnapsackInstance(from_json_dict(data), float(data["b"]), data["c"])
    except (KeyError, TypeError) as exc:
        raise InvalidTable(f"instance JSON missing fields ({exc})") from exc

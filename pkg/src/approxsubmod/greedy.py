"""Cardinality-constrained greedy with an exhaustive optimum and performance bounds.

Every ``bound_*`` function checks its own hypotheses and raises
:class:`NotApplicable` when they fail; :func:`bound_suite` collects all of
them for one ``(K, L)`` and asserts the validity invariant
``bound <= f(S_L) + 1e-9`` for each applicable one.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _bits
from .errors import BoundViolation, InvalidParams, NotApplicable, NotCertified
from .metrics import (
    local_submod_violation,
    min_eps_for_pair,
    submod_violation,
    submodularity_index,
    submodularity_indicator,
    submodularity_ratio,
    verify_eps_sandwich,
)
from .setfn import SetFunction, certify_flags

VALIDITY_TOL = 1e-9
BOUND_NAMES = ("nemhauser", "delta", "local_delta", "indicator", "ratio", "index", "horel")
CSV_COLUMNS = ("t", "K", "L", "greedy_value", "opt_value") + BOUND_NAMES


class GreedyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GreedyTrace:
    """Greedy run: ``chosen[l]`` is added at step ``l + 1``.

    ``prefix_sets`` is the collection ``{}, S_1, ..., S_L`` as masks;
    ``values[l]`` is ``f(S_{l+1})``.
    """

    chosen: tuple[int, ...]
    prefix_sets: tuple[int, ...]
    values: tuple[float, ...]

    @property
    def L(self) -> int:
        return len(self.chosen)

    @property
    def final(self) -> int:
        return self.prefix_sets[-1]

    def value(self, f: SetFunction) -> float:
        return f.eval(self.final)

    def verify(self, f: SetFunction) -> bool:
        """Re-run each step and confirm the recorded choice is the first maximizer."""
        cur = 0
        for e, nxt in zip(self.chosen, self.prefix_sets[1:]):
            if _greedy_step(f, cur) != e or nxt != cur | (1 << (e - 1)):
                return False
            cur = nxt
        return True


def _greedy_step(f: SetFunction, cur: int) -> int:
    v = f.values
    best, best_e = -math.inf, 0
    for i in range(f.n):
        if cur >> i & 1:
            continue
        gain = v[cur | (1 << i)] - v[cur]
        if gain > best:
            best, best_e = gain, i + 1
    return best_e


def greedy_run(f: SetFunction, L: int) -> GreedyTrace:
    if not 0 <= L <= f.n:
        raise InvalidParams(f"L must lie in 0..{f.n}, got {L}")
    flags = certify_flags(f)
    if not (flags.increasing and flags.nonneg):
        warnings.warn("greedy guarantees assume an increasing nonnegative f", GreedyWarning, stacklevel=2)
    chosen, prefixes, vals = [], [0], []
    cur = 0
    for _ in range(L):
        e = _greedy_step(f, cur)
        cur |= 1 << (e - 1)
        chosen.append(e)
        prefixes.append(cur)
        vals.append(float(f.values[cur]))
    return GreedyTrace(tuple(chosen), tuple(prefixes), tuple(vals))


def brute_force_opt(f: SetFunction, K: int) -> tuple[int, float]:
    """Best mask with at most ``K`` elements; ties go to the smallest mask."""
    if not 0 <= K <= f.n:
        raise InvalidParams(f"K must lie in 0..{f.n}, got {K}")
    masks = np.flatnonzero(_bits.popcounts(f.n) <= K)
    i = int(np.argmax(f.values[masks]))
    return int(masks[i]), float(f.values[masks[i]])


# -- bounds ------------------------------------------------------------------------------

@dataclass
class BoundReport:
    name: str
    value: float | None
    inputs: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.value is not None

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "inputs": _jsonable(self.inputs),
                "reason": self.reason}


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, float) and math.isinf(v):
            v = "inf" if v > 0 else "-inf"
        elif isinstance(v, (np.floating, np.integer)):
            v = v.item()
        out[k] = v
    return out


def _check_kl(f: SetFunction, K: int, L: int) -> None:
    if not 1 <= K <= f.n:
        raise InvalidParams(f"K must lie in 1..{f.n}, got {K}")
    if not 0 <= L <= f.n:
        raise InvalidParams(f"L must lie in 0..{f.n}, got {L}")


def _require_monotone(f: SetFunction) -> None:
    flags = certify_flags(f)
    if not (flags.nonneg and flags.increasing):
        raise NotApplicable("bound requires a nonnegative increasing f")


def _opt(f: SetFunction, K: int, f_hat: float | None) -> float:
    return brute_force_opt(f, K)[1] if f_hat is None else float(f_hat)


def bound_nemhauser(f_hat: float, K: int, L: int) -> float:
    if K < 1 or L < 0:
        raise InvalidParams("need K >= 1 and L >= 0")
    return f_hat * (1.0 - (1.0 - 1.0 / K) ** L)


def bound_delta(f: SetFunction, K: int, L: int, f_hat: float | None = None) -> BoundReport:
    _check_kl(f, K, L)
    if L > f.n - 1:
        raise NotApplicable("delta bound is stated for L <= n - 1")
    _require_monotone(f)
    fh = _opt(f, K, f_hat)
    delta = submod_violation(f, L, K).value
    val = (fh - min(delta, fh)) * (1.0 - ((K - 1) / K) ** L)
    return BoundReport("delta", val, {"Delta": delta, "K": K, "L": L, "f_hat": fh})


def bound_local_delta(f: SetFunction, trace: GreedyTrace, K: int,
                      f_hat: float | None = None) -> BoundReport:
    L = trace.L
    _check_kl(f, K, L)
    if L > f.n - 1:
        raise NotApplicable("local delta bound is stated for L <= n - 1")
    _require_monotone(f)
    fh = _opt(f, K, f_hat)
    dhat = local_submod_violation(f, trace.prefix_sets, K).value
    val = (fh - min(dhat, fh)) * (1.0 - (1.0 - 1.0 / K) ** L)
    return BoundReport("local_delta", val, {"Delta_hat": dhat, "K": K, "L": L, "f_hat": fh})


def bound_indicator(f: SetFunction, trace: GreedyTrace, K: int,
                    f_hat: float | None = None) -> BoundReport:
    L = trace.L
    _check_kl(f, K, L)
    _require_monotone(f)
    fh = _opt(f, K, f_hat)
    ind = submodularity_indicator(f, trace.prefix_sets, K)
    val = min(fh, (1.0 - (1.0 - 1.0 / K) ** L) * (fh - min(ind, fh)))
    return BoundReport("indicator", val, {"I_hat": ind, "K": K, "L": L, "f_hat": fh})


def bound_ratio(f: SetFunction, trace: GreedyTrace, K: int,
                f_hat: float | None = None) -> BoundReport:
    """(1 - exp(-gamma L / K)) f(S_hat_K) with gamma the ratio over the greedy set S_L.

    At ``L = K`` this is the familiar ``1 - exp(-gamma)`` factor.
    """
    L = trace.L
    _check_kl(f, K, L)
    _require_monotone(f)
    fh = _opt(f, K, f_hat)
    gamma = submodularity_ratio(f, trace.final, K)
    inputs = {"gamma": gamma, "K": K, "L": L, "f_hat": fh}
    if gamma == -math.inf:
        raise NotApplicable("submodularity ratio constraint family is infeasible")
    if L == 0:
        val = 0.0
    elif gamma == math.inf:
        val = fh
    else:
        val = -fh * math.expm1(-gamma * L / K)
    return BoundReport("ratio", val, inputs)


def bound_index(f: SetFunction, trace: GreedyTrace, f_hat: float | None = None) -> BoundReport:
    """(1 - 1/e - I/f(S_K)) f(S_hat_K) with the index I over the greedy set; needs L = K.

    The variant with ``f(S_hat_K)`` in the denominator is reported in
    ``inputs["value_opt_denominator"]``.
    """
    K = trace.L
    if K < 1 or K > f.n:
        raise NotApplicable("index bound needs L = K >= 1")
    _require_monotone(f)
    fh = _opt(f, K, f_hat)
    greedy_val = f.eval(trace.final)
    idx = submodularity_index(f, trace.final, K)
    if not 0 < idx <= fh:
        raise NotApplicable(f"index {idx} outside (0, f_hat]")
    if greedy_val <= 0:
        raise NotApplicable("index bound needs f(S_K) > 0")
    base = 1.0 - 1.0 / math.e
    val = (base - idx / greedy_val) * fh
    alt = (base - idx / fh) * fh
    return BoundReport("index", val, {"I": idx, "K": K, "L": K, "f_hat": fh,
                                      "greedy_value": greedy_val, "value_opt_denominator": alt,
                                      "denominators_differ": alt != val})


def horel_value(f_hat: float, K: int, L: int, eps: float) -> float:
    e1, e2 = (1 - eps) ** 2, (1 + eps) ** 2
    coef = e1 * f_hat / (4 * K * eps + e1)
    return coef * (1.0 - ((K - 1) * e1 / (K * e2)) ** L)


def bound_horel(f: SetFunction, trace: GreedyTrace, K: int, eps: float, g: SetFunction,
                f_hat: float | None = None) -> BoundReport:
    """Multiplicative bound for f sandwiched by a submodular ``g`` on the region of S_L and S_hat_K."""
    L = trace.L
    _check_kl(f, K, L)
    if not 0 < eps < 1:
        raise InvalidParams(f"eps must lie in (0, 1), got {eps}")
    _require_monotone(f)
    opt_mask, fh_exact = brute_force_opt(f, K)
    fh = fh_exact if f_hat is None else float(f_hat)
    region = trace.final | opt_mask
    if not verify_eps_sandwich(f, g, eps, region):
        raise NotCertified(f"f is not ({region}, {eps})-approximately submodular against g")
    return BoundReport("horel", horel_value(fh, K, L, eps),
                       {"eps": eps, "K": K, "L": L, "f_hat": fh, "region": region})


# -- suite -------------------------------------------------------------------------------

@dataclass
class SuiteResult:
    K: int
    L: int
    trace: GreedyTrace
    greedy_value: float
    opt_mask: int
    opt_value: float
    reports: dict

    def value(self, name: str) -> float | None:
        return self.reports[name].value

    def to_json(self) -> dict:
        return {"K": self.K, "L": self.L, "chosen": list(self.trace.chosen),
                "greedy_value": self.greedy_value, "opt_mask": self.opt_mask,
                "opt_value": self.opt_value,
                "bounds": [self.reports[k].to_json() for k in BOUND_NAMES]}


def bound_suite(f: SetFunction, K: int, L: int, g: SetFunction | None = None,
                eps: float | None = None, check: bool = True) -> SuiteResult:
    """Greedy, optimum, and every bound at ``(K, L)``.

    When ``g`` is given without ``eps``, eps is the tightest value on the
    bound's region.  Raises :class:`BoundViolation` if an applicable bound
    exceeds the greedy value.
    """
    _check_kl(f, K, L)
    if eps is not None and g is None:
        raise InvalidParams("eps needs a reference submodular g")
    trace = greedy_run(f, L)
    greedy_val = trace.value(f)
    opt_mask, fh = brute_force_opt(f, K)
    reports: dict[str, BoundReport] = {}

    def run(name, thunk):
        try:
            reports[name] = thunk()
        except NotApplicable as exc:
            reports[name] = BoundReport(name, None, reason=str(exc))

    def nem():
        _require_monotone(f)
        if not certify_flags(f).submodular:
            raise NotApplicable("nemhauser bound requires a submodular f")
        return BoundReport("nemhauser", bound_nemhauser(fh, K, L), {"K": K, "L": L, "f_hat": fh})

    def horel():
        if g is None:
            raise NotApplicable("no reference submodular function supplied")
        e = eps if eps is not None else min_eps_for_pair(f, g, trace.final | opt_mask)
        if not 0 < e < 1:
            raise NotApplicable(f"eps {e} outside (0, 1)")
        try:
            return bound_horel(f, trace, K, e, g, fh)
        except NotCertified as exc:
            raise NotApplicable(str(exc)) from exc

    def index():
        if L != K:
            raise NotApplicable("index bound needs L = K")
        return bound_index(f, trace, fh)

    run("nemhauser", nem)
    run("delta", lambda: bound_delta(f, K, L, fh))
    run("local_delta", lambda: bound_local_delta(f, trace, K, fh))
    run("indicator", lambda: bound_indicator(f, trace, K, fh))
    run("ratio", lambda: bound_ratio(f, trace, K, fh))
    run("index", index)
    run("horel", horel)

    if check:
        for rep in reports.values():
            if rep.applicable and rep.value > greedy_val + VALIDITY_TOL:
                raise BoundViolation(f"{rep.name} bound {rep.value} exceeds greedy value {greedy_val}")
    return SuiteResult(K, L, trace, greedy_val, opt_mask, fh, reports)


def fmt_float(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.12g}"


def suite_row(res: SuiteResult, t) -> list[str]:
    row = [fmt_float(t), str(res.K), str(res.L), fmt_float(res.greedy_value), fmt_float(res.opt_value)]
    return row + [fmt_float(res.value(k)) for k in BOUND_NAMES]


def write_bounds_csv(rows: Sequence[Sequence[str]], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)

"""Dense-tableau two-phase simplex with Bland's rule.

Internal solver for ``min c.y  s.t.  A y = b, y >= 0`` with ``b >= 0``.
Sized for the convex-closure LP: ``n + 1`` rows and ``2**n`` columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LpError

PIVOT_TOL = 1e-9


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray
    objective: float
    basis: list[int]
    iterations: int


def _pivot(t: np.ndarray, r: int, j: int) -> None:
    t[r] /= t[r, j]
    col = t[:, j].copy()
    col[r] = 0.0
    t -= np.outer(col, t[r])


def _run(t: np.ndarray, basis: list[int], n_cols: int, tol: float, max_iter: int) -> tuple[str, int]:
    """Bland's-rule iterations on tableau ``t`` whose last row is the reduced-cost row."""
    m = t.shape[0] - 1
    for it in range(max_iter):
        cost = t[m, :n_cols]
        entering = np.flatnonzero(cost < -tol)
        if entering.size == 0:
            return "optimal", it
        j = int(entering[0])
        col = t[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return "unbounded", it
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(t, r, j)
        basis[r] = j
    raise LpError(f"simplex did not converge in {max_iter} iterations")


def solve(c, a_eq, b_eq, tol: float = PIVOT_TOL, max_iter: int = 100_000) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial basis, minimize the artificial sum
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[m, :n] = -a.sum(axis=0)
    t[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    status, it1 = _run(t, basis, n + m, tol, max_iter)
    if status != "optimal":
        raise LpError(f"phase 1 ended {status}")
    if -t[m, -1] > tol * max(1.0, float(np.abs(b).max(initial=0.0))) * 10:
        return SimplexResult("infeasible", np.full(n, np.nan), np.nan, basis, it1)

    # drive zero-valued artificials out; drop rows that turn out redundant
    keep = []
    for i in range(m):
        if basis[i] >= n:
            cand = np.flatnonzero(np.abs(t[i, :n]) > tol)
            if cand.size:
                _pivot(t, i, int(cand[0]))
                basis[i] = int(cand[0])
            else:
                continue
        keep.append(i)
    t = np.vstack([t[keep][:, list(range(n)) + [t.shape[1] - 1]], np.zeros((1, n + 1))])
    basis = [basis[i] for i in keep]
    m2 = len(keep)

    # phase 2
    t[m2, :n] = c
    for i, bi in enumerate(basis):
        t[m2] -= c[bi] * t[i]
    status, it2 = _run(t, basis, n, tol, max_iter)
    x = np.zeros(n)
    for i, bi in enumerate(basis):
        x[bi] = t[i, -1]
    if status != "optimal":
        return SimplexResult(status, x, -np.inf, basis, it1 + it2)
    return SimplexResult("optimal", x, float(c @ x), basis, it1 + it2)

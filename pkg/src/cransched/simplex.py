"""Dense two-phase tableau simplex for small LPs.

Solves ``min c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_ge @ x >= b_ge``,
``x >= 0`` with ``b_ub, b_ge >= 0``. Dantzig's rule is used until a pivot
budget runs out, then Bland's rule takes over to guarantee termination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


class SolverError(RuntimeError):
    """The simplex could not reach a verdict (pivot limit or numerical breakdown)."""


@dataclass
class LpResult:
    status: str
    x: np.ndarray
    objective: float
    pivots: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])
    basis[row] = col


def _run(T, basis, allowed, tol, piv_tol, budget, limit, pivots):
    """Pivot until optimal for the cost row stored in ``T[-1]``. Returns pivot count."""
    m = T.shape[0] - 1
    while True:
        d = T[-1, :-1]
        candidates = np.flatnonzero((d < -tol) & allowed)
        if candidates.size == 0:
            return pivots
        if pivots >= limit:
            raise SolverError(f"simplex exceeded {limit} pivots")
        bland = pivots >= budget
        col = candidates[0] if bland else candidates[np.argmin(d[candidates])]
        colv = T[:m, col]
        rows = np.flatnonzero(colv > piv_tol)
        if rows.size == 0:
            raise SolverError("LP unbounded; objective should be bounded below")
        ratios = T[rows, -1] / colv[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        if bland:
            row = ties[np.argmin(basis[ties])]
        else:
            row = ties[np.argmax(colv[ties])]
        _pivot(T, basis, row, col)
        pivots += 1


def solve_lp(c, A_ub, b_ub, A_ge, b_ge, *, tol: float = 1e-9, max_pivots: int | None = None) -> LpResult:
    c = np.asarray(c, float)
    n = c.size
    A_ub = np.asarray(A_ub, float).reshape(-1, n)
    A_ge = np.asarray(A_ge, float).reshape(-1, n)
    b_ub = np.asarray(b_ub, float)
    b_ge = np.asarray(b_ge, float)
    m1, m2 = A_ub.shape[0], A_ge.shape[0]
    m = m1 + m2
    if np.any(b_ub < 0) or np.any(b_ge < 0):
        raise ValueError("right-hand sides must be non-negative")

    # columns: x | slack (ub) | surplus (ge) | artificial (ge) | rhs
    ncol = n + m1 + 2 * m2
    A = np.zeros((m, ncol))
    A[:m1, :n] = A_ub
    A[m1:, :n] = A_ge
    A[:m1, n : n + m1] = np.eye(m1)
    A[m1:, n + m1 : n + m1 + m2] = -np.eye(m2)
    A[m1:, n + m1 + m2 :] = np.eye(m2)
    b = np.concatenate([b_ub, b_ge])

    T = np.zeros((m + 1, ncol + 1))
    T[:m, :ncol] = A
    T[:m, -1] = b
    basis = np.concatenate([np.arange(n, n + m1), np.arange(n + m1 + m2, ncol)])
    art = np.zeros(ncol, bool)
    art[n + m1 + m2 :] = True

    budget = 50 * (m + n) + 50
    limit = max_pivots if max_pivots is not None else 5000 * (m + n) + 5000
    piv_tol = 1e-11
    pivots = 0

    if m2:
        # phase 1: minimise the sum of artificials
        T[-1, :ncol] = -A[m1:].sum(axis=0)
        T[-1, :ncol][art] = 0.0
        T[-1, -1] = -b_ge.sum()
        pivots = _run(T, basis, np.ones(ncol, bool), tol, piv_tol, budget, limit, pivots)
        if -T[-1, -1] > tol * max(1.0, b_ge.sum()):
            return LpResult(INFEASIBLE, np.zeros(n), np.nan, pivots)
        # drive remaining artificials out of the basis, drop redundant rows
        keep = np.ones(m + 1, bool)
        for i in range(m):
            if art[basis[i]]:
                row = T[i, :ncol]
                cand = np.flatnonzero((np.abs(row) > 1e-9) & ~art)
                if cand.size:
                    _pivot(T, basis, i, cand[np.argmax(np.abs(row[cand]))])
                else:
                    keep[i] = False
        T = T[keep]
        basis = basis[keep[:m]]
        A = A[keep[:m]]
        b = b[keep[:m]]
        m = T.shape[0] - 1

    allowed = ~art
    cost = np.zeros(ncol)
    cost[:n] = c
    T[-1, :ncol] = cost - cost[basis] @ T[:m, :ncol]
    T[-1, -1] = -cost[basis] @ T[:m, -1]
    pivots = _run(T, basis, allowed, tol, piv_tol, budget, limit, pivots)

    xfull = np.zeros(ncol)
    xfull[basis] = T[:m, -1]
    # one refinement solve against the untouched constraint matrix
    try:
        xb = np.linalg.solve(A[:, basis], b)
        if np.all(np.isfinite(xb)) and np.all(xb > -1e-7 * max(1.0, np.abs(xb).max())):
            xfull[basis] = xb
    except np.linalg.LinAlgError:
        pass
    x = np.maximum(xfull[:n], 0.0)
    return LpResult(OPTIMAL, x, float(c @ x), pivots)

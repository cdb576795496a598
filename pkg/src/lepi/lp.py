"""Dense two-phase tableau simplex for small LP relaxations.

    min c'x  s.t.  A_ub x <= b_ub,  A_eq x == b_eq,  lb <= x <= ub

Dantzig pricing, switching to Bland's rule once a run of degenerate pivots
suggests stalling.  Sizes here are a few hundred rows at most, so the full
tableau is kept in a numpy array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

FEAS_TOL = 1e-9
PIV_TOL = 1e-9
STALL_PIVOTS = 50


class Infeasible(Exception):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded" | "iteration_limit"
    x: Optional[np.ndarray] = None
    fun: float = float("nan")
    iterations: int = 0


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list, n_struct: int):
        self.T = T  # last row: reduced costs, last column: rhs
        self.basis = basis
        self.n_struct = n_struct
        self.iterations = 0

    def pivot(self, r: int, col: int):
        T = self.T
        T[r] /= T[r, col]
        colv = T[:, col].copy()
        colv[r] = 0.0
        nz = np.nonzero(np.abs(colv) > 0)[0]
        if len(nz):
            T[nz] -= np.outer(colv[nz], T[r])
        self.basis[r] = col
        self.iterations += 1

    def run(self, allowed: np.ndarray, tol: float, max_iter: int) -> str:
        T = self.T
        m = T.shape[0] - 1
        degenerate = 0
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            d = T[-1, :-1]
            cand = np.nonzero((d < -tol) & allowed)[0]
            if len(cand) == 0:
                return "optimal"
            bland = degenerate >= STALL_PIVOTS
            col = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
            colv = T[:m, col]
            rows = np.nonzero(colv > PIV_TOL)[0]
            if len(rows) == 0:
                return "unbounded"
            ratios = T[rows, -1] / colv[rows]
            rmin = ratios.min()
            ties = rows[ratios <= rmin + 1e-12]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[np.argmax(colv[ties])])
            degenerate = degenerate + 1 if T[r, -1] <= FEAS_TOL else 0
            self.pivot(r, col)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lb=None, ub=None,
             tol: float = FEAS_TOL, max_iter: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    n = len(c)
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    lb = np.zeros(n) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)
    if np.any(lb > ub + tol):
        return LPResult("infeasible")

    # x = shift + M y with y >= 0; fixed variables drop out, free ones split.
    shift = np.zeros(n)
    cols = []  # (original var, sign)
    upper_rows = []
    for j in range(n):
        lo, hi = lb[j], ub[j]
        if np.isfinite(lo) and np.isfinite(hi) and hi - lo <= tol:
            shift[j] = lo
        elif np.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                upper_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    k = len(cols)
    M = np.zeros((n, k))
    for col, (j, s) in enumerate(cols):
        M[j, col] = s

    Aub = A_ub @ M
    bub = b_ub - A_ub @ shift
    if upper_rows:
        U = np.zeros((len(upper_rows), k))
        for r, (col, cap) in enumerate(upper_rows):
            U[r, col] = 1.0
        Aub = np.vstack([Aub, U])
        bub = np.concatenate([bub, [cap for _, cap in upper_rows]])
    Aeq = A_eq @ M
    beq = b_eq - A_eq @ shift
    cy = M.T @ c
    const = float(c @ shift)

    m_ub, m_eq = len(bub), len(beq)
    m = m_ub + m_eq
    # columns: y (k) | slacks (m_ub) | artificials (as needed)
    neg = bub < 0
    need_art = list(np.nonzero(neg)[0]) + [m_ub + r for r in range(m_eq)]
    n_art = len(need_art)
    width = k + m_ub + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m_ub, :k] = Aub
    T[:m_ub, k:k + m_ub] = np.eye(m_ub)
    T[:m_ub, -1] = bub
    T[m_ub:m, :k] = Aeq
    T[m_ub:m, -1] = beq
    flip = np.concatenate([neg, beq < 0])
    T[:m][flip] *= -1.0
    basis = [k + r if r < m_ub else -1 for r in range(m)]
    for a, r in enumerate(need_art):
        T[r, k + m_ub + a] = 1.0
        basis[r] = k + m_ub + a

    tab = _Tableau(T, basis, k)
    allowed = np.ones(width, dtype=bool)
    if n_art:
        T[-1, k + m_ub:width] = 1.0
        for r in need_art:
            T[-1] -= T[r]
        status = tab.run(allowed, tol, max_iter)
        if status == "iteration_limit":
            return LPResult(status, iterations=tab.iterations)
        scale = max(1.0, float(np.abs(T[:m, -1]).max(initial=0.0)))
        if -T[-1, -1] > 1e-7 * scale:
            return LPResult("infeasible", iterations=tab.iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for r in range(m):
            if tab.basis[r] >= k + m_ub:
                row = T[r, :k + m_ub]
                nz = np.nonzero(np.abs(row) > 1e-7)[0]
                if len(nz):
                    tab.pivot(r, int(nz[0]))
                    keep.append(r)
            else:
                keep.append(r)
        T = np.vstack([T[keep], T[-1:]])
        T = np.delete(T, np.s_[k + m_ub:width], axis=1)
        tab.T = T
        tab.basis = [tab.basis[r] for r in keep]
        width = k + m_ub
        allowed = np.ones(width, dtype=bool)
        m = len(keep)

    T = tab.T
    T[-1, :] = 0.0
    T[-1, :k] = cy
    for r, col in enumerate(tab.basis):
        if col < k and cy[col] != 0.0:
            T[-1] -= cy[col] * T[r]
    status = tab.run(allowed, tol, max_iter)
    if status != "optimal":
        return LPResult(status, iterations=tab.iterations)
    y = np.zeros(width)
    for r, col in enumerate(tab.basis):
        y[col] = T[r, -1]
    x = shift + M @ y[:k]
    return LPResult("optimal", x, float(c @ x), tab.iterations)


def solve_lp_highs(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lb=None, ub=None, **_) -> LPResult:
    """Same contract backed by scipy's HiGHS (used as a cross-check and speed option)."""
    from scipy.optimize import linprog

    n = len(c)
    lb = np.zeros(n) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)
    bounds = [(None if not np.isfinite(l) else l, None if not np.isfinite(u) else u) for l, u in zip(lb, ub)]
    res = linprog(c, A_ub=A_ub if A_ub is not None and len(A_ub) else None,
                  b_ub=b_ub if b_ub is not None and len(b_ub) else None,
                  A_eq=A_eq if A_eq is not None and len(A_eq) else None,
                  b_eq=b_eq if b_eq is not None and len(b_eq) else None,
                  bounds=bounds, method="highs")
    status = {0: "optimal", 1: "iteration_limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "infeasible")
    if status != "optimal":
        return LPResult(status, iterations=int(res.nit))
    return LPResult("optimal", np.asarray(res.x), float(res.fun), int(res.nit))

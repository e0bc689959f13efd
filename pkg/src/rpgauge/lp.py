"""Small dense two-phase simplex.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`` for the
tiny programs that appear in gauge evaluation (a few dozen variables at
most). Bland's rule keeps it cycle-free; after the final pivot the basic
solution is recomputed from the original data with a dense solve, which
removes the rounding accumulated in the tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray]
    fun: float
    iterations: int = 0

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    piv = tab[row].copy()
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] -= tab[i, col] * piv
    tab[:, col] = 0.0
    tab[row, col] = 1.0


def _simplex(tab: np.ndarray, basis: list[int], ncols: int, tol: float,
             max_iter: int) -> tuple[str, int]:
    """Run Bland's rule on ``tab`` (last row = reduced costs, last col = rhs)."""
    m = tab.shape[0] - 1
    for it in range(max_iter):
        cost = tab[-1, :ncols]
        entering = -1
        for j in range(ncols):
            if cost[j] < -tol:
                entering = j
                break
        if entering < 0:
            return "optimal", it
        col = tab[:m, entering]
        best, leave = np.inf, -1
        for i in range(m):
            if col[i] > tol:
                ratio = tab[i, -1] / col[i]
                if leave < 0 or ratio < best - 1e-15 or (
                        abs(ratio - best) <= 1e-15 and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            return "unbounded", it
        _pivot(tab, leave, entering)
        basis[leave] = entering
    raise RuntimeError("simplex iteration limit reached")


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *,
            tol: float = 1e-11, max_iter: int = 5000) -> LPResult:
    """Minimize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # standard form  [A_ub I; A_eq 0] [x; s] = b
    A = np.zeros((m, n + m_ub))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    A[flip] *= -1.0
    b = np.where(flip, -b, b)
    nv = n + m_ub

    # rows that do not start with a usable slack get an artificial variable
    need_art = [i for i in range(m) if i >= m_ub or flip[i]]
    na = len(need_art)
    tab = np.zeros((m + 1, nv + na + 1))
    tab[:m, :nv] = A
    tab[:m, -1] = b
    basis = [n + i if i < m_ub else -1 for i in range(m)]
    for k, i in enumerate(need_art):
        tab[i, nv + k] = 1.0
        basis[i] = nv + k

    iters = 0
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if na:
        tab[-1, nv:nv + na] = 1.0
        for i in need_art:
            tab[-1] -= tab[i]
        status, it = _simplex(tab, basis, nv + na, tol, max_iter)
        iters += it
        if -tab[-1, -1] > 1e-9 * scale:
            return LPResult("infeasible", None, float("nan"), iters)
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= nv:
                nz = [j for j in range(nv) if abs(tab[i, j]) > 1e-9]
                if nz:
                    _pivot(tab, i, nz[0])
                    basis[i] = nz[0]
        keep = [i for i in range(m) if basis[i] < nv]
        tab = np.vstack([tab[keep][:, list(range(nv)) + [tab.shape[1] - 1]],
                         np.zeros((1, nv + 1))])
        basis = [basis[i] for i in keep]
    cfull = np.concatenate([c, np.zeros(m_ub)])
    tab[-1, :nv] = cfull
    tab[-1, -1] = 0.0
    for i, j in enumerate(basis):
        if tab[-1, j] != 0.0:
            tab[-1] -= tab[-1, j] * tab[i]
    status, it = _simplex(tab, basis, nv, tol, max_iter)
    iters += it
    if status == "unbounded":
        return LPResult("unbounded", None, -np.inf, iters)

    x = np.zeros(nv)
    x[basis] = tab[:-1, -1]
    # refine the basic solution against the unperturbed constraint matrix
    if basis:
        B = A[:, basis]
        try:
            xb, *_ = np.linalg.lstsq(B, b, rcond=None)
            if np.all(xb >= -1e-9):
                x = np.zeros(nv)
                x[basis] = np.maximum(xb, 0.0)
        except np.linalg.LinAlgError:
            pass
    xs = x[:n]
    return LPResult("optimal", xs, float(c @ xs), iters)

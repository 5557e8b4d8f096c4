"""Dense two-phase simplex and the Afriat-style slack LPs built on it.

The slack LP finds utility levels ``u_t`` and per-observation slacks
``eps_t >= 0`` minimizing ``sum_t eps_t`` subject to
``u_s <= u_t + p^t . (x^s - x^t) + eps_t``. The constrained version keeps only
the pairs where ``x^s`` was affordable at ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _tol
from .dataset import Dataset
from .errors import Infeasible, IterationLimit, TooLarge, Unbounded

REDUCED_COST_TOL = 1e-10
PIVOT_TOL = 1e-12
MAX_AFRIAT_T = 300


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize ``c . x`` subject to ``A x <= b``; ``free[j]`` marks variables without the ``x_j >= 0`` bound."""

    c: NDArray[np.float64]
    A: NDArray[np.float64]
    b: NDArray[np.float64]
    free: NDArray[np.bool_]

    @classmethod
    def build(cls, c: ArrayLike, A: ArrayLike, b: ArrayLike, free: ArrayLike | None = None) -> "LinearProgram":
        c = np.asarray(c, float).ravel()
        n = c.size
        A = np.asarray(A, float).reshape(-1, n)
        b = np.asarray(b, float).ravel()
        if A.shape[0] != b.size:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        free = np.zeros(n, bool) if free is None else np.asarray(free, bool).ravel()
        if free.size != n:
            raise ValueError("free mask must have one entry per variable")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP coefficients must be finite")
        return cls(c, A, b, free)


@dataclass(frozen=True, eq=False)
class LPSolution:
    value: float
    x: NDArray[np.float64]
    iterations: int


class _Tableau:
    """Rows ``[B^-1 A | B^-1 b]`` with an explicit basis; objective handled per phase."""

    def __init__(self, M: NDArray[np.float64], rhs: NDArray[np.float64], basis: list[int], limit: int):
        self.M = M
        self.rhs = rhs
        self.basis = basis
        self.iterations = 0
        self.limit = limit

    def pivot(self, r: int, j: int) -> None:
        piv = self.M[r, j]
        self.M[r] /= piv
        self.rhs[r] /= piv
        col = self.M[:, j].copy()
        col[r] = 0.0
        self.M -= np.outer(col, self.M[r])
        self.rhs -= col * self.rhs[r]
        self.M[:, j] = 0.0
        self.M[r, j] = 1.0
        self.basis[r] = j

    def optimize(self, cost: NDArray[np.float64], allowed: NDArray[np.bool_]) -> None:
        """Bland's rule: lowest-index improving column enters, lowest-index basic variable breaks ratio ties."""
        while True:
            cb = cost[self.basis]
            reduced = cost - cb @ self.M
            candidates = np.flatnonzero(allowed & (reduced < -REDUCED_COST_TOL))
            if candidates.size == 0:
                return
            if self.iterations >= self.limit:
                raise IterationLimit(f"simplex exceeded {self.limit} pivots")
            j = int(candidates[0])
            col = self.M[:, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                raise Unbounded("objective is unbounded below")
            ratios = np.maximum(self.rhs[rows], 0.0) / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            self.iterations += 1


def simplex_solve(lp: LinearProgram, max_iter: int | None = None) -> LPSolution:
    """Optimal basic solution by two-phase simplex.

    Free variables are split into differences of two non-negative ones. Raises
    :class:`Infeasible`, :class:`Unbounded` or :class:`IterationLimit`.
    """
    m, n = lp.A.shape
    free_idx = np.flatnonzero(lp.free)
    # structural columns: originals, then negated copies of free ones, then slacks
    A = np.hstack([lp.A, -lp.A[:, free_idx], np.eye(m)])
    c = np.concatenate([lp.c, -lp.c[free_idx], np.zeros(m)])
    n_struct = A.shape[1]
    b = lp.b.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    art_rows = np.flatnonzero(neg)
    n_art = art_rows.size
    art = np.zeros((m, n_art))
    art[art_rows, np.arange(n_art)] = 1.0
    M = np.hstack([A, art])
    basis = [n_struct - m + i for i in range(m)]
    for k, r in enumerate(art_rows):
        basis[r] = n_struct + k
    limit = max_iter if max_iter is not None else 50 * (n + m)
    tab = _Tableau(M, b, basis, limit)
    total = n_struct + n_art

    if n_art:
        phase1 = np.zeros(total)
        phase1[n_struct:] = 1.0
        tab.optimize(phase1, np.ones(total, bool))
        infeas = float(tab.rhs[[i for i, j in enumerate(tab.basis) if j >= n_struct]].sum())
        if infeas > 1e-9 * max(1.0, float(np.abs(lp.b).max(initial=0.0))):
            raise Infeasible(f"phase one ended with infeasibility {infeas:.3g}")
        # drive remaining (zero-level) artificials out of the basis
        keep = []
        for r, j in enumerate(list(tab.basis)):
            if j < n_struct:
                keep.append(r)
                continue
            nz = np.flatnonzero(np.abs(tab.M[r, :n_struct]) > 1e-9)
            if nz.size:
                tab.pivot(r, int(nz[0]))
                keep.append(r)
        # rows left with an artificial basic are redundant
        tab.M = tab.M[keep]
        tab.rhs = tab.rhs[keep]
        tab.basis = [tab.basis[r] for r in keep]

    cost = np.concatenate([c, np.zeros(n_art)])
    allowed = np.ones(total, bool)
    allowed[n_struct:] = False
    tab.optimize(cost, allowed)

    y = np.zeros(total)
    y[tab.basis] = tab.rhs
    x = y[:n].copy()
    x[free_idx] -= y[n : n + free_idx.size]
    return LPSolution(float(lp.c @ x), x, tab.iterations)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AfriatSolution:
    epsilon_bar: float
    u: NDArray[np.float64]
    eps: NDArray[np.float64]
    constrained: bool

    def to_dict(self) -> dict:
        return {
            "epsilon_bar": self.epsilon_bar,
            "u": [float(v) for v in self.u],
            "eps": [float(v) for v in self.eps],
        }


def afriat_lp(d: Dataset, constrained: bool = False, tol: float | None = None) -> LinearProgram:
    """Variables ``(u_1..u_T, eps_1..eps_T)``; one row ``u_s - u_t - eps_t <= p^t . (x^s - x^t)`` per pair."""
    tol = _tol.resolve(tol)
    T = d.T
    e = d.expenditure.values
    own = np.diag(e)
    rows, rhs = [], []
    for t in range(T):
        for s in range(T):
            if s == t:
                continue
            if constrained and not own[t] >= e[t, s] - tol:
                continue
            row = np.zeros(2 * T)
            row[s] += 1.0
            row[t] -= 1.0
            row[T + t] = -1.0
            rows.append(row)
            rhs.append(e[t, s] - own[t])
    c = np.concatenate([np.zeros(T), np.ones(T)])
    A = np.array(rows) if rows else np.zeros((0, 2 * T))
    free = np.concatenate([np.ones(T, bool), np.zeros(T, bool)])
    return LinearProgram.build(c, A, np.array(rhs), free)


def solve_afriat_lp(d: Dataset, constrained: bool = False, tol: float | None = None) -> AfriatSolution:
    """Minimum total slack; equals TMP (or constrained TMP) at the optimum.

    Utility levels are shifted so that ``min_t u_t = 0``.
    """
    if d.T > MAX_AFRIAT_T:
        raise TooLarge(f"dense slack LP is limited to T <= {MAX_AFRIAT_T}, got {d.T}")
    sol = simplex_solve(afriat_lp(d, constrained, tol))
    T = d.T
    u = sol.x[:T] - sol.x[:T].min()
    eps = sol.x[T:].copy()
    return AfriatSolution(float(eps.sum()), u, eps, constrained)


def lp_violation(d: Dataset, u: ArrayLike, eps: ArrayLike, constrained: bool = False, tol: float | None = None) -> float:
    """Largest amount by which ``(u, eps)`` breaks a slack-LP constraint (<= 0 when feasible)."""
    tol = _tol.resolve(tol)
    u = np.asarray(u, float)
    eps = np.asarray(eps, float)
    e = d.expenditure.values
    own = np.diag(e)
    # excess[t, s] = u_s - u_t - p^t.(x^s - x^t) - eps_t
    excess = u[None, :] - u[:, None] - (e - own[:, None]) - eps[:, None]
    if constrained:
        excess = np.where(own[:, None] >= e - tol, excess, -np.inf)
    return float(max(excess.max(), -eps.min()))

"""Dense two-phase primal simplex for small linear programs.

Solves ``min / max c @ x`` subject to ``A @ x == b`` and ``lower <= x <= upper``
(bounds may be infinite). Variables are shifted so every working column has a
lower bound of zero; finite upper bounds are handled by the bounded-variable
ratio test instead of extra rows. Pivoting follows Bland's rule in both phases,
so the iteration terminates without perturbation and the result is a
deterministic function of the input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, LpFailure

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
TIE_TOL = 1e-12
PHASE1_TOL = 1e-8
MAX_ITER = 100_000


class Sense(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        n = c.shape[0]
        A = np.asarray(self.eq_matrix, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        b = np.asarray(self.eq_rhs, dtype=float).ravel()
        lo = np.asarray(self.var_lower, dtype=float).ravel()
        hi = np.asarray(self.var_upper, dtype=float).ravel()
        if A.ndim != 2 or A.shape[1] != n or A.shape[0] != b.shape[0]:
            raise DimensionMismatch(
                f"constraint matrix {A.shape} inconsistent with {n} variables and {b.shape[0]} rows")
        if lo.shape[0] != n or hi.shape[0] != n:
            raise DimensionMismatch("variable bounds must have one entry per variable")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise DimensionMismatch("variable bounds must satisfy lower <= upper")
        if np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise DimensionMismatch("lower bounds cannot be +inf nor upper bounds -inf")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise DimensionMismatch("objective and constraints must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "eq_matrix", A)
        object.__setattr__(self, "eq_rhs", b)
        object.__setattr__(self, "var_lower", lo)
        object.__setattr__(self, "var_upper", hi)
        object.__setattr__(self, "sense", Sense(self.sense))

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def n_rows(self) -> int:
        return self.eq_rhs.shape[0]


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective_value: float | None
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Working state of the bounded-variable simplex over ``0 <= y <= u``."""

    def __init__(self, T, y, u, basis):
        self.T = T
        self.y = y
        self.u = u
        self.basis = basis
        self.at_upper = np.zeros(y.shape[0], dtype=bool)
        self.is_basic = np.zeros(y.shape[0], dtype=bool)
        self.is_basic[basis] = True
        self.iterations = 0

    def run(self, cost, enterable) -> LpStatus:
        T, y, u, basis = self.T, self.y, self.u, self.basis
        d = cost - cost[basis] @ T
        finite_u = np.isfinite(u)
        big = np.iinfo(np.int64).max
        while True:
            if self.iterations >= MAX_ITER:
                raise LpFailure("simplex iteration limit reached")
            up = self.at_upper
            cand = enterable & ~self.is_basic & np.where(up, d > COST_TOL, d < -COST_TOL)
            j = int(cand.argmax())
            if not cand[j]:
                return LpStatus.OPTIMAL
            sigma = -1.0 if up[j] else 1.0
            alpha = sigma * T[:, j]
            yb = y[basis]

            dec = alpha > PIVOT_TOL
            inc = (alpha < -PIVOT_TOL) & finite_u[basis]
            ratios = np.full(yb.shape[0], np.inf)
            np.divide(yb, alpha, out=ratios, where=dec)
            np.divide(u[basis] - yb, -alpha, out=ratios, where=inc)
            np.maximum(ratios, 0.0, out=ratios)

            theta_flip = u[j]
            theta = min(ratios.min(initial=np.inf), theta_flip)
            if theta == np.inf:
                return LpStatus.UNBOUNDED

            # Bland: among blocking variables, the smallest index leaves.
            leave_row = None
            leave_var = j if theta_flip <= theta + TIE_TOL else big
            for r in np.flatnonzero(ratios <= theta + TIE_TOL):
                if basis[r] < leave_var:
                    leave_var, leave_row = basis[r], r

            self.iterations += 1
            y[basis] = yb - theta * alpha
            if leave_row is None:
                up[j] = not up[j]
                y[j] = u[j] if up[j] else 0.0
                continue

            r = leave_row
            y[j] = (u[j] if sigma < 0 else 0.0) + sigma * theta
            if alpha[r] > 0:
                y[leave_var] = 0.0
                up[leave_var] = False
            else:
                y[leave_var] = u[leave_var]
                up[leave_var] = True
            up[j] = False

            pivot_row = T[r] / T[r, j]
            col = T[:, j].copy()
            col[r] = 0.0
            T -= col[:, None] * pivot_row
            T[r] = pivot_row
            d -= d[j] * pivot_row
            basis[r] = j
            self.is_basic[leave_var] = False
            self.is_basic[j] = True


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp``; infeasibility and unboundedness are statuses, not exceptions."""
    c, A, b = lp.objective, lp.eq_matrix, lp.eq_rhs
    lo, hi = lp.var_lower, lp.var_upper
    m, n = A.shape

    # Column map onto nonnegative working variables y: x = offset + sum(sign * y).
    has_lo = np.isfinite(lo)
    has_hi = np.isfinite(hi)
    free = ~has_lo & ~has_hi
    offset = np.where(has_lo, lo, np.where(has_hi, hi, 0.0))
    first_sign = np.where(has_lo | free, 1.0, -1.0)
    first_span = np.where(has_lo, hi - np.where(has_lo, lo, 0.0), np.inf)
    free_idx = np.flatnonzero(free)
    src = np.concatenate([np.arange(n), free_idx])
    sign = np.concatenate([first_sign, -np.ones(free_idx.size)])
    span = np.concatenate([first_span, np.full(free_idx.size, np.inf)])
    nw = src.shape[0]

    Aw = A[:, src] * sign
    cw = c[src] * sign
    if lp.sense is Sense.MAXIMIZE:
        cw = -cw
    bw = b - A @ offset
    flip = bw < 0
    Aw[flip] *= -1.0
    bw[flip] *= -1.0

    T = np.hstack([Aw, np.eye(m)])
    full = T.copy()
    u = np.concatenate([span, np.full(m, np.inf)])
    y = np.concatenate([np.zeros(nw), bw])
    basis = np.arange(nw, nw + m)
    tab = _Tableau(T, y, u, basis)

    phase1 = np.concatenate([np.zeros(nw), np.ones(m)])
    enterable = u > 0
    tab.run(phase1, enterable)
    if y[nw:].sum() > PHASE1_TOL:
        return LpSolution(LpStatus.INFEASIBLE, None, None, tab.iterations)

    # Artificials stay in the tableau pinned to zero; basic ones leave through
    # degenerate pivots whenever a blocking tie selects them.
    u[nw:] = 0.0
    enterable = u > 0
    phase2 = np.concatenate([cw, np.zeros(m)])
    status = tab.run(phase2, enterable)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(status, None, None, tab.iterations)

    # Re-solve the basic block from the original columns to shed pivot drift.
    nonbasic = ~tab.is_basic
    if m:
        rhs = bw - full[:, nonbasic] @ y[nonbasic]
        y[basis] = np.linalg.solve(full[:, basis], rhs)
    y = np.clip(y, 0.0, u)

    x = offset.copy()
    np.add.at(x, src, sign * y[:nw])
    x = np.clip(x, lo, hi)
    return LpSolution(LpStatus.OPTIMAL, x, float(c @ x), tab.iterations)

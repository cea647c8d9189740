"""Point-identified transport objects under the ordinal cost ``|i - j|``."""

from __future__ import annotations

import numpy as np

from .core import (
    TOL,
    CellBoundsMatrix,
    Coupling,
    OrdinalDistribution,
    check_same_k,
)
from .errors import LpFailure, OutOfRange
from .lp import LinearProgram, LpStatus, Sense, solve

# Half-width of the band that stands in for "cost == target" in the LPs.
COST_SLACK = 1e-9


def cost_matrix(K: int) -> np.ndarray:
    idx = np.arange(K)
    return np.abs(idx[:, None] - idx[None, :]).astype(float)


def discrepancy(mu: OrdinalDistribution, nu: OrdinalDistribution) -> float:
    """L1 distance between the two CDFs over the K-1 interior thresholds."""
    check_same_k(mu, nu)
    gap = np.cumsum(mu.probs - nu.probs)[:-1]
    return float(np.abs(gap).sum())


def transport_cost(c) -> float:
    """Total threshold crossings ``sum |i-j| * mass[i, j]``.

    Accepts a :class:`Coupling` or any square array, so that matrices that are
    not valid couplings can still be scored.
    """
    mass = c.mass if isinstance(c, Coupling) else np.asarray(c, dtype=float)
    return float((cost_matrix(mass.shape[0]) * mass).sum())


def min_cost_coupling(mu: OrdinalDistribution, nu: OrdinalDistribution) -> Coupling:
    """Monotone (northwest-corner) coupling, optimal for the ordinal cost."""
    K = check_same_k(mu, nu)
    row = mu.probs.copy()
    col = nu.probs.copy()
    mass = np.zeros((K, K))
    i = j = 0
    while i < K and j < K:
        q = min(row[i], col[j])
        mass[i, j] = q
        row[i] -= q
        col[j] -= q
        # the exhausted side is exactly 0.0 after subtracting the min
        if row[i] <= col[j]:
            i += 1
        else:
            j += 1
    mass = mass / mass.sum()
    return Coupling(mass)


def _marginal_rows(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-sum and column-sum operators on a row-major flattened K x K matrix."""
    eye = np.eye(K)
    ones = np.ones((1, K))
    return np.kron(eye, ones), np.kron(ones, eye)


def transport_program(mu: OrdinalDistribution, nu: OrdinalDistribution, objective,
                      sense=Sense.MINIMIZE, cost_target: float | None = None) -> LinearProgram:
    """LP over couplings in Pi(mu, nu), optionally pinned to a transport cost.

    The last column-sum row is dropped because it is implied by the others.
    A pinned cost adds one slack variable confined to ``[-COST_SLACK, COST_SLACK]``.
    """
    K = check_same_k(mu, nu)
    R, C = _marginal_rows(K)
    A = np.vstack([R, C[:-1]])
    b = np.concatenate([mu.probs, nu.probs[:-1]])
    obj = np.asarray(objective, dtype=float).ravel()
    lower = np.zeros(K * K)
    upper = np.ones(K * K)
    if cost_target is not None:
        cost_row = np.append(cost_matrix(K).ravel(), -1.0)
        A = np.hstack([A, np.zeros((A.shape[0], 1))])
        A = np.vstack([A, cost_row])
        b = np.append(b, cost_target)
        obj = np.append(obj, 0.0)
        lower = np.append(lower, -COST_SLACK)
        upper = np.append(upper, COST_SLACK)
    return LinearProgram(obj, A, b, lower, upper, sense)


def _require(sol, what: str):
    if sol.status is not LpStatus.OPTIMAL:
        raise LpFailure(f"{what}: LP reported {sol.status.value}")
    return sol


def cell_extremes(build, K: int) -> tuple[np.ndarray, np.ndarray, list]:
    """Minimize and maximize every coupling cell over the LP family ``build``.

    ``build(objective, sense)`` returns a program whose first K*K variables are
    the coupling. Cells are solved in row-major order, min before max; the
    witnesses list follows the same order.
    """
    lo = np.empty((K, K))
    hi = np.empty((K, K))
    witnesses = []
    for i in range(K):
        for j in range(K):
            e = np.zeros(K * K)
            e[i * K + j] = 1.0
            for sense, out in ((Sense.MINIMIZE, lo), (Sense.MAXIMIZE, hi)):
                sol = _require(solve(build(e, sense)), f"cell ({i + 1},{j + 1}) {sense.value}")
                out[i, j] = sol.objective_value
                witnesses.append(sol.x[:K * K].reshape(K, K))
    lo = np.clip(lo, 0.0, 1.0)
    hi = np.clip(hi, 0.0, 1.0)
    hi = np.maximum(hi, lo)
    return lo, hi, witnesses


def optimal_cell_bounds(mu: OrdinalDistribution, nu: OrdinalDistribution,
                        return_witnesses: bool = False):
    """Per-cell range of mass over all cost-minimizing couplings of ``(mu, nu)``."""
    K = check_same_k(mu, nu)
    target = discrepancy(mu, nu)
    lo, hi, wit = cell_extremes(
        lambda e, sense: transport_program(mu, nu, e, sense, cost_target=target), K)
    bounds = CellBoundsMatrix(lo, hi)
    if return_witnesses:
        return bounds, wit
    return bounds


def max_mobility(mu: OrdinalDistribution, nu: OrdinalDistribution) -> tuple[float, Coupling]:
    """Largest transport cost over Pi(mu, nu) and one coupling attaining it."""
    K = check_same_k(mu, nu)
    sol = _require(solve(transport_program(mu, nu, cost_matrix(K), Sense.MAXIMIZE)),
                   "maximal mobility")
    mass = np.clip(sol.x.reshape(K, K), 0.0, None)
    return sol.objective_value, Coupling(mass / mass.sum())


def frechet_cell_bounds(mu: OrdinalDistribution, nu: OrdinalDistribution) -> CellBoundsMatrix:
    check_same_k(mu, nu)
    a = mu.probs[:, None]
    b = nu.probs[None, :]
    lo = np.maximum(0.0, a + b - 1.0)
    hi = np.minimum(a, b)
    return CellBoundsMatrix(np.minimum(lo, hi), hi)


def normalized_discrepancy(value: float, K: int) -> float:
    """Scale a discrepancy by its maximum attainable value ``K - 1``."""
    if K < 2:
        raise OutOfRange("K must be at least 2")
    if value < -TOL or value > K - 1 + TOL:
        raise OutOfRange(f"discrepancy {value} outside [0, {K - 1}]")
    return min(max(value, 0.0), K - 1) / (K - 1)

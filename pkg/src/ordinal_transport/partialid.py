"""Worst-case identified sets under item nonresponse.

A sample with response rate ``p`` and observed shares ``m_obs`` pins each
category share to ``[p * m_obs_k, p * m_obs_k + (1 - p)]``. The discrepancy
over the product of two such boxes is an interval whose ends come from linear
programs, and each end carries its own set of coupling-cell bounds.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    MAX_K,
    TOL,
    CellBoundsMatrix,
    Coupling,
    Interval,
    MarginalBox,
    ObservedSample,
    OrdinalDistribution,
    check_same_k,
    make_distribution,
)
from .errors import InfeasibleEndpoint, KTooLarge, LpFailure, NoObservations, OutOfRange
from .lp import LinearProgram, LpStatus, Sense, solve
from .transport import (
    COST_SLACK,
    _marginal_rows,
    cell_extremes,
    cost_matrix,
    discrepancy,
    min_cost_coupling,
    optimal_cell_bounds,
)


class Endpoint(str, enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True, eq=False)
class IdentifiedInterval:
    d_low: float
    d_up: float
    witness_low: tuple[OrdinalDistribution, OrdinalDistribution]
    witness_up: tuple[OrdinalDistribution, OrdinalDistribution]

    @property
    def interval(self) -> Interval:
        return Interval(self.d_low, self.d_up)

    def value(self, endpoint: Endpoint) -> float:
        return self.d_low if Endpoint(endpoint) is Endpoint.LOWER else self.d_up

    def witness(self, endpoint: Endpoint):
        return self.witness_low if Endpoint(endpoint) is Endpoint.LOWER else self.witness_up


@dataclass(frozen=True, eq=False)
class EndpointCouplingBounds:
    endpoint: Endpoint
    value: float
    bounds: CellBoundsMatrix
    representative: Coupling

    def required_transitions(self, tol: float = TOL) -> list[tuple[int, int]]:
        """1-indexed cells that every configuration at this endpoint must use."""
        i, j = np.nonzero(self.bounds.lo > tol)
        return [(int(a) + 1, int(b) + 1) for a, b in zip(i, j)]

    def excluded_transitions(self, tol: float = TOL) -> list[tuple[int, int]]:
        """1-indexed cells that no configuration at this endpoint uses."""
        i, j = np.nonzero(self.bounds.hi <= tol)
        return [(int(a) + 1, int(b) + 1) for a, b in zip(i, j)]

    @property
    def degenerate(self) -> bool:
        """Zero endpoint: the coupling set is too large to say much."""
        return self.value <= TOL


def identified_set(s: ObservedSample, response_rate: float | None = None) -> MarginalBox:
    """Sharp box for the population distribution behind ``s``.

    ``response_rate`` overrides the empirical ``(n - missing) / n``.
    """
    p = s.response_rate if response_rate is None else float(response_rate)
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"response rate {p} outside [0, 1]")
    if s.n_observed == 0:
        if p > 0:
            raise NoObservations("a positive response rate needs at least one observed unit")
        return MarginalBox(np.zeros(s.K), np.ones(s.K))
    obs = np.asarray(s.counts, dtype=float) / s.n_observed
    lower = p * obs
    return MarginalBox(lower, np.minimum(lower + (1.0 - p), 1.0))


def cdf_bounds(box: MarginalBox) -> list[Interval]:
    """Sharp bounds on ``F(k)`` for the K-1 interior thresholds."""
    low = np.cumsum(box.lower)[:-1]
    w = box.missing_share
    return [Interval(float(np.clip(a, 0, 1)), float(np.clip(a + w, 0, 1))) for a in low]


def _box_program(box_mu: MarginalBox, box_nu: MarginalBox, extra: int):
    """Shared skeleton: variables (gamma, eta, extra...), both simplex rows."""
    K = box_mu.K
    n = 2 * K + extra
    A = np.zeros((2, n))
    A[0, :K] = 1.0
    A[1, K:2 * K] = 1.0
    lower = np.concatenate([box_mu.lower, box_nu.lower, np.zeros(extra)])
    upper = np.concatenate([box_mu.upper, box_nu.upper, np.full(extra, np.inf)])
    return A, np.ones(2), lower, upper


def _cdf_gap_operator(K: int) -> np.ndarray:
    """(K-1) x 2K matrix G with ``G @ (gamma, eta) = F_gamma(k) - F_eta(k)``."""
    L = np.tril(np.ones((K, K)))[:-1]
    return np.hstack([L, -L])


def _lower_endpoint(box_mu, box_nu):
    K = box_mu.K
    k1 = K - 1
    G = _cdf_gap_operator(K)
    # variables: gamma, eta, t (k1), s_plus (k1), s_minus (k1)
    A0, b0, lower, upper = _box_program(box_mu, box_nu, 3 * k1)
    I = np.eye(k1)
    Z = np.zeros((k1, k1))
    # t - G z - s_plus = 0  and  t + G z - s_minus = 0
    top = np.hstack([-G, I, -I, Z])
    bot = np.hstack([G, I, Z, -I])
    A = np.vstack([A0, top, bot])
    b = np.concatenate([b0, np.zeros(2 * k1)])
    c = np.concatenate([np.zeros(2 * K), np.ones(k1), np.zeros(2 * k1)])
    sol = solve(LinearProgram(c, A, b, lower, upper, Sense.MINIMIZE))
    if sol.status is not LpStatus.OPTIMAL:
        raise LpFailure(f"lower endpoint LP reported {sol.status.value}")
    return sol.x[:K], sol.x[K:2 * K]


def _upper_endpoint(box_mu, box_nu):
    K = box_mu.K
    G = _cdf_gap_operator(K)
    A, b, lower, upper = _box_program(box_mu, box_nu, 0)
    best = None
    # Patterns in increasing binary order; ties keep the earliest.
    for bits in itertools.product((0, 1), repeat=K - 1):
        s = np.where(np.array(bits) == 1, -1.0, 1.0)
        sol = solve(LinearProgram(s @ G, A, b, lower, upper, Sense.MAXIMIZE))
        if sol.status is not LpStatus.OPTIMAL:
            raise LpFailure(f"sign-pattern LP reported {sol.status.value}")
        if best is None or sol.objective_value > best[0] + 1e-12:
            best = (sol.objective_value, sol.x)
    x = best[1]
    return x[:K], x[K:]


def _as_witness(v: np.ndarray, box: MarginalBox) -> OrdinalDistribution:
    v = np.clip(v, box.lower, box.upper)
    return make_distribution(v / v.sum())


def discrepancy_endpoints(box_mu: MarginalBox, box_nu: MarginalBox) -> IdentifiedInterval:
    """Smallest and largest discrepancy over pairs drawn from the two boxes."""
    K = check_same_k(box_mu, box_nu)
    if K > MAX_K:
        raise KTooLarge(f"K={K} exceeds {MAX_K}")
    g_lo, e_lo = _lower_endpoint(box_mu, box_nu)
    g_up, e_up = _upper_endpoint(box_mu, box_nu)
    w_lo = (_as_witness(g_lo, box_mu), _as_witness(e_lo, box_nu))
    w_up = (_as_witness(g_up, box_mu), _as_witness(e_up, box_nu))
    # Endpoints are reported as the discrepancy of the witnesses, which is the
    # LP optimum up to rounding and keeps the two in exact agreement.
    d_low = discrepancy(*w_lo)
    d_up = discrepancy(*w_up)
    return IdentifiedInterval(d_low, max(d_up, d_low), w_lo, w_up)


def coupling_box_program(box_mu: MarginalBox, box_nu: MarginalBox, objective, sense,
                         cost_target: float) -> LinearProgram:
    """LP over couplings whose margins lie in the boxes and whose cost is pinned.

    Variables: the K*K coupling (row-major), gamma (K), eta (K), one cost slack.
    """
    K = box_mu.K
    R, C = _marginal_rows(K)
    nk = K * K
    n = nk + 2 * K + 1
    A = np.zeros((2 * K + 2, n))
    A[:K, :nk] = R
    A[:K, nk:nk + K] = -np.eye(K)
    A[K:2 * K, :nk] = C
    A[K:2 * K, nk + K:nk + 2 * K] = -np.eye(K)
    A[2 * K, nk:nk + K] = 1.0
    A[2 * K + 1, :nk] = cost_matrix(K).ravel()
    A[2 * K + 1, -1] = -1.0
    b = np.zeros(2 * K + 2)
    b[2 * K] = 1.0
    b[2 * K + 1] = cost_target
    lower = np.concatenate([np.zeros(nk), box_mu.lower, box_nu.lower, [-COST_SLACK]])
    upper = np.concatenate([np.ones(nk), box_mu.upper, box_nu.upper, [COST_SLACK]])
    c = np.zeros(n)
    c[:nk] = np.asarray(objective, dtype=float).ravel()
    return LinearProgram(c, A, b, lower, upper, sense)


def endpoint_coupling_bounds(box_mu: MarginalBox, box_nu: MarginalBox, endpoint,
                             interval: IdentifiedInterval | None = None) -> EndpointCouplingBounds:
    """Cellwise range of couplings with box-feasible margins at an endpoint cost.

    The representative is the monotone coupling of the endpoint witness pair.
    """
    K = check_same_k(box_mu, box_nu)
    endpoint = Endpoint(endpoint)
    if interval is None:
        interval = discrepancy_endpoints(box_mu, box_nu)
    value = interval.value(endpoint)

    def build(e, sense):
        return coupling_box_program(box_mu, box_nu, e, sense, value)

    try:
        lo, hi, _ = cell_extremes(build, K)
    except LpFailure as exc:
        raise InfeasibleEndpoint(f"{endpoint.value} endpoint {value} is not attainable") from exc
    rep = min_cost_coupling(*interval.witness(endpoint))
    return EndpointCouplingBounds(endpoint, value, CellBoundsMatrix(lo, hi), rep)


def box_vertices(box: MarginalBox) -> np.ndarray:
    """Extreme points of a sample-built box: all missing mass on one category."""
    return box.lower[None, :] + box.missing_share * np.eye(box.K)


def upper_endpoint_gap(box_mu: MarginalBox, box_nu: MarginalBox, step: float = 0.05,
                       interval: IdentifiedInterval | None = None):
    """Compare literal upper-endpoint cell bounds with the optimal-only version.

    The literal set admits any box-feasible coupling whose cost equals the
    upper endpoint, including couplings that are not cost-minimal for their own
    margins. The optimal-only envelope is approximated by scanning a grid of
    margin pairs (step ``step`` in missing-mass space) that attain the upper
    endpoint and taking the union of their optimal-coupling cell bounds.
    Returns ``(literal, optimal_only)``; the second is ``None`` when no grid
    pair attains the endpoint.
    """
    if interval is None:
        interval = discrepancy_endpoints(box_mu, box_nu)
    literal = endpoint_coupling_bounds(box_mu, box_nu, Endpoint.UPPER, interval).bounds
    gm = simplex_grid(box_mu.K, step) * box_mu.missing_share + box_mu.lower
    ge = simplex_grid(box_nu.K, step) * box_nu.missing_share + box_nu.lower
    Fm = np.cumsum(gm, axis=1)[:, :-1]
    Fe = np.cumsum(ge, axis=1)[:, :-1]
    D = np.abs(Fm[:, None, :] - Fe[None, :, :]).sum(axis=2)
    hits = np.argwhere(np.abs(D - interval.d_up) <= 1e-9)
    if hits.size == 0:
        return literal, None
    K = box_mu.K
    lo = np.full((K, K), np.inf)
    hi = np.full((K, K), -np.inf)
    for a, b in hits:
        cb = optimal_cell_bounds(make_distribution(gm[a] / gm[a].sum()),
                                 make_distribution(ge[b] / ge[b].sum()))
        lo = np.minimum(lo, cb.lo)
        hi = np.maximum(hi, cb.hi)
    return literal, CellBoundsMatrix(lo, hi)


def simplex_grid(K: int, step: float) -> np.ndarray:
    """All points of the K-simplex whose coordinates are multiples of ``step``."""
    N = int(round(1.0 / step))
    if not np.isclose(N * step, 1.0):
        raise OutOfRange("grid step must divide 1")
    pts = []
    for comp in itertools.combinations(range(N + K - 1), K - 1):
        prev = -1
        parts = []
        for c in comp:
            parts.append(c - prev - 1)
            prev = c
        parts.append(N + K - 2 - prev)
        pts.append(parts)
    return np.asarray(pts, dtype=float) / N

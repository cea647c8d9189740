"""Maximal-deviation bootstrap for the discrepancy interval and coupling bounds.

Each replication redraws both samples with replacement, rebuilds the boxes and
recomputes every bound. The confidence set widens the plug-in bounds by the
``ceil((1 - alpha) * B)``-th order statistic of the largest outward deviation.
Replication ``b`` draws from a generator seeded with ``seed ^ b``, so results
do not depend on execution order or on how replications are spread over
worker processes.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import CellBoundsMatrix, Interval, ObservedSample, check_same_k
from .errors import InfeasibleEndpoint, LpFailure, NoObservations, OutOfRange
from .partialid import (
    Endpoint,
    EndpointCouplingBounds,
    IdentifiedInterval,
    discrepancy_endpoints,
    endpoint_coupling_bounds,
    identified_set,
)

log = logging.getLogger(__name__)

THREADS_ENV = "ORDINAL_TRANSPORT_THREADS"
MAX_RETRIES = 100
ENDPOINTS = (Endpoint.LOWER, Endpoint.UPPER)


@dataclass(frozen=True)
class BootstrapConfig:
    replications: int = 499
    alpha: float = 0.05
    seed: int = 0
    n_jobs: int | None = None

    def __post_init__(self):
        if int(self.replications) < 1:
            raise OutOfRange("replications must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise OutOfRange("alpha must lie strictly between 0 and 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise OutOfRange("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class InferenceReport:
    point: IdentifiedInterval
    ci_d: Interval
    critical_value_d: float
    point_cells: dict = field(default_factory=dict)
    cell_cis: dict = field(default_factory=dict)
    simultaneous_cis: dict = field(default_factory=dict)
    critical_value_sim: float | None = None
    replication_log: np.ndarray | None = None
    retries: int = 0


def resample(s: ObservedSample, rng: np.random.Generator) -> ObservedSample:
    """Multinomial redraw of ``n`` units over the K categories plus 'missing'."""
    cells = np.append(np.asarray(s.counts, dtype=float), s.missing) / s.n
    draw = rng.multinomial(s.n, cells)
    return ObservedSample(tuple(int(v) for v in draw[:-1]), int(draw[-1]))


def order_statistic_quantile(values, alpha: float) -> float:
    """The ``ceil((1 - alpha) * B)``-th smallest value (1-indexed)."""
    v = np.sort(np.asarray(values, dtype=float))
    k = max(1, math.ceil((1.0 - alpha) * v.shape[0] - 1e-9))
    return float(v[k - 1])


def _estimate(source, target, p, q, cells):
    box_mu = identified_set(source, p)
    box_nu = identified_set(target, q)
    interval = discrepancy_endpoints(box_mu, box_nu)
    ecb = {}
    if cells:
        ecb = {e: endpoint_coupling_bounds(box_mu, box_nu, e, interval) for e in ENDPOINTS}
    return interval, ecb


def _replicate(args):
    """Run a block of replications; top-level so worker processes can import it."""
    source, target, p, q, cells, seed, B, indices = args
    out = []
    for b in indices:
        attempt = 0
        while True:
            rng = np.random.default_rng(seed ^ (b + attempt * B))
            try:
                interval, ecb = _estimate(resample(source, rng), resample(target, rng), p, q, cells)
                break
            except (LpFailure, InfeasibleEndpoint, NoObservations) as exc:
                attempt += 1
                if attempt > MAX_RETRIES:
                    raise
                log.warning("replication %d failed (%s); redrawing with next derived seed", b, exc)
        lo = np.stack([ecb[e].bounds.lo for e in ENDPOINTS]) if cells else None
        hi = np.stack([ecb[e].bounds.hi for e in ENDPOINTS]) if cells else None
        out.append((b, interval.d_low, interval.d_up, lo, hi, attempt))
    return out


def _n_workers(cfg: BootstrapConfig) -> int:
    n = cfg.n_jobs
    if n is None:
        n = int(os.environ.get(THREADS_ENV, "1") or 1)
    if n == 0:
        n = os.cpu_count() or 1
    return max(1, min(n, cfg.replications))


def _run(source, target, cfg, p, q, cells):
    B = int(cfg.replications)
    workers = _n_workers(cfg)
    blocks = [list(range(B))[w::workers] for w in range(workers)]
    jobs = [(source, target, p, q, cells, int(cfg.seed), B, blk) for blk in blocks]
    if workers == 1:
        results = [_replicate(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_replicate, jobs))
    rows = sorted((r for block in results for r in block), key=lambda r: r[0])
    d = np.array([[r[1], r[2]] for r in rows])
    lo = np.stack([r[3] for r in rows]) if cells else None
    hi = np.stack([r[4] for r in rows]) if cells else None
    retries = sum(r[5] for r in rows)
    return d, lo, hi, retries


def bootstrap(source: ObservedSample, target: ObservedSample, cfg: BootstrapConfig,
              cells: bool = True, p: float | None = None, q: float | None = None) -> InferenceReport:
    """Plug-in bounds plus every bootstrap confidence set in one pass.

    ``p`` and ``q`` override the empirical response rates of the source and
    target samples; the override is held fixed across replications.
    """
    K = check_same_k(source, target)
    point, point_cells = _estimate(source, target, p, q, cells)
    d, lo, hi, retries = _run(source, target, cfg, p, q, cells)

    t_d = np.maximum(-(d[:, 0] - point.d_low), d[:, 1] - point.d_up)
    c_d = order_statistic_quantile(t_d, cfg.alpha)
    expand = max(c_d, 0.0)
    ci_d = Interval(max(point.d_low - expand, 0.0), min(point.d_up + expand, K - 1.0))

    cell_cis, sim_cis, c_sim = {}, {}, None
    if cells:
        plo = np.stack([point_cells[e].bounds.lo for e in ENDPOINTS])
        phi = np.stack([point_cells[e].bounds.hi for e in ENDPOINTS])
        # shape (B, endpoint, K, K)
        t_cell = np.maximum(-(lo - plo), hi - phi)
        c_cell = np.apply_along_axis(order_statistic_quantile, 0, t_cell, cfg.alpha)
        c_sim = order_statistic_quantile(t_cell.reshape(t_cell.shape[0], -1).max(axis=1), cfg.alpha)
        for k, e in enumerate(ENDPOINTS):
            ce = np.maximum(c_cell[k], 0.0)
            cell_cis[e] = CellBoundsMatrix(np.clip(plo[k] - ce, 0, 1), np.clip(phi[k] + ce, 0, 1))
            cs = max(c_sim, 0.0)
            sim_cis[e] = CellBoundsMatrix(np.clip(plo[k] - cs, 0, 1), np.clip(phi[k] + cs, 0, 1))

    return InferenceReport(point=point, ci_d=ci_d, critical_value_d=c_d,
                           point_cells=point_cells, cell_cis=cell_cis, simultaneous_cis=sim_cis,
                           critical_value_sim=c_sim, replication_log=d, retries=retries)


def confidence_set_d(source: ObservedSample, target: ObservedSample, cfg: BootstrapConfig,
                     p: float | None = None, q: float | None = None) -> tuple[IdentifiedInterval, Interval]:
    rep = bootstrap(source, target, cfg, cells=False, p=p, q=q)
    return rep.point, rep.ci_d


def confidence_cell_bounds(source: ObservedSample, target: ObservedSample, cfg: BootstrapConfig,
                           endpoint, p: float | None = None, q: float | None = None) -> CellBoundsMatrix:
    rep = bootstrap(source, target, cfg, cells=True, p=p, q=q)
    return rep.cell_cis[Endpoint(endpoint)]


def simultaneous_cell_bounds(source: ObservedSample, target: ObservedSample, cfg: BootstrapConfig,
                             p: float | None = None, q: float | None = None) -> dict:
    rep = bootstrap(source, target, cfg, cells=True, p=p, q=q)
    return rep.simultaneous_cis

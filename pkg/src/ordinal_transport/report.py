"""JSON report assembly. Categories are 1-indexed in every emitted field."""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from . import __version__
from .partialid import Endpoint
from .transport import normalized_discrepancy

SCHEMA_VERSION = "1.0"

DEGENERATE_NOTE = ("lower endpoint is zero: the set of minimal-mobility couplings is large "
                   "and uninformative about the structure of transitions")


def _vec(a):
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def _mat(a):
    return [[float(v) for v in row] for row in np.asarray(a, dtype=float)]


def _cells(bounds):
    return {"lo": _mat(bounds.lo), "hi": _mat(bounds.hi)}


def _sample(s):
    return {
        "counts": list(s.counts),
        "missing": s.missing,
        "n": s.n,
        "response_rate": s.response_rate,
        "observed_distribution": (_vec(np.asarray(s.counts) / s.n_observed)
                                  if s.n_observed else None),
    }


def _endpoint_section(ecb):
    out = {
        "value": ecb.value,
        "bounds": _cells(ecb.bounds),
        "representative": _mat(ecb.representative.mass),
        "representative_label": "representative (one of possibly many)",
        "required_transitions": [list(c) for c in ecb.required_transitions()],
        "excluded_transitions": [list(c) for c in ecb.excluded_transitions()],
        "degenerate": bool(ecb.degenerate),
    }
    if ecb.endpoint is Endpoint.LOWER and ecb.degenerate:
        out["note"] = DEGENERATE_NOTE
    return out


def point_section(est) -> dict:
    K = est.n_categories_
    iv = est.interval_
    return {
        "d_low": iv.d_low,
        "d_up": iv.d_up,
        "normalized": [normalized_discrepancy(iv.d_low, K), normalized_discrepancy(iv.d_up, K)],
        "witness_low": {"source": _vec(iv.witness_low[0].probs), "target": _vec(iv.witness_low[1].probs)},
        "witness_up": {"source": _vec(iv.witness_up[0].probs), "target": _vec(iv.witness_up[1].probs)},
    }


def bounds_section(est) -> dict:
    src, tgt = est.cdf_bounds()
    return {
        "identified_sets": {
            "source": {"lower": _vec(est.source_box_.lower), "upper": _vec(est.source_box_.upper)},
            "target": {"lower": _vec(est.target_box_.lower), "upper": _vec(est.target_box_.upper)},
        },
        "cdf_bounds": {
            "source": [[iv.lo, iv.hi] for iv in src],
            "target": [[iv.lo, iv.hi] for iv in tgt],
        },
        "discrepancy": point_section(est),
    }


def couplings_section(est) -> dict:
    return {e.value: _endpoint_section(ecb) for e, ecb in est.endpoint_couplings_.items()}


def benchmarks_section(est) -> dict | None:
    bm = est.observed_benchmarks()
    if bm is None:
        return None
    K = est.n_categories_
    out = {
        "basis": "observed-respondent distributions",
        "discrepancy": bm["discrepancy"],
        "normalized_discrepancy": normalized_discrepancy(bm["discrepancy"], K),
        "min_cost_coupling": _mat(bm["min_cost_coupling"].mass),
        "max_mobility": bm["max_mobility"],
        "normalized_max_mobility": normalized_discrepancy(bm["max_mobility"], K),
        "max_mobility_coupling": _mat(bm["max_mobility_coupling"].mass),
        "frechet_bounds": _cells(bm["frechet"]),
    }
    if "optimal_cell_bounds" in bm:
        out["optimal_cell_bounds"] = _cells(bm["optimal_cell_bounds"])
    return out


def inference_section(est) -> dict | None:
    rep = est.inference_
    if rep is None:
        return None
    K = est.n_categories_
    out = {
        "alpha": float(est.alpha),
        "replications": int(est.n_bootstrap),
        "seed": int(est.random_state),
        "ci_d": [rep.ci_d.lo, rep.ci_d.hi],
        "ci_d_normalized": [normalized_discrepancy(rep.ci_d.lo, K), normalized_discrepancy(rep.ci_d.hi, K)],
        "critical_value_d": rep.critical_value_d,
        "critical_value_simultaneous": rep.critical_value_sim,
        "cell_cis": {e.value: _cells(b) for e, b in rep.cell_cis.items()},
        "simultaneous_cis": {e.value: _cells(b) for e, b in rep.simultaneous_cis.items()},
        "replication_log": [[float(a), float(b)] for a, b in rep.replication_log],
        "retries": int(rep.retries),
    }
    return out


def build_report(est, inputs: dict | None = None, figures=()) -> dict:
    """Everything the estimator knows, as plain JSON-compatible data."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "ordinal-transport", "version": __version__},
        "seed": int(est.random_state),
        "inputs": inputs or {},
        "K": est.n_categories_,
        "point_identified": bool(est.point_identified_),
        "samples": {"source": _sample(est.source_sample_), "target": _sample(est.target_sample_)},
        **bounds_section(est),
        "endpoint_couplings": couplings_section(est),
        "observed_benchmarks": benchmarks_section(est),
        "inference": inference_section(est),
        "figures": list(figures),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text("utf-8"))

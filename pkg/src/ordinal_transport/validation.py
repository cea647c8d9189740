"""Input checks shared by the estimator and the functional API."""

from __future__ import annotations

import numbers

import numpy as np

from .core import MAX_K, ObservedSample, OrdinalDistribution, make_distribution
from .errors import DataError, OutOfRangeCategory


def _is_missing(v, missing_values) -> bool:
    if v is None:
        return True
    if isinstance(v, numbers.Real) and not isinstance(v, bool) and np.isnan(v):
        return True
    if isinstance(v, str):
        return v.strip() in missing_values
    return v in missing_values or str(v) in missing_values


def check_responses(values, n_categories: int | None = None,
                    missing_values=("*", "NA", "", "98", "99")) -> ObservedSample:
    """Tally respondent-level codes into an :class:`ObservedSample`.

    ``values`` may hold integers 1..K, floats with NaN for nonresponse,
    ``None`` or any of ``missing_values``. An :class:`ObservedSample` passes
    through unchanged (after a K check).
    """
    if isinstance(values, ObservedSample):
        if n_categories is not None and values.K != n_categories:
            raise DataError(f"sample has K={values.K}, expected {n_categories}")
        return values
    missing_values = {str(m).strip() for m in missing_values}
    arr = np.asarray(values, dtype=object).ravel()
    if arr.size == 0:
        raise DataError("empty response vector")
    cats, missing = [], 0
    for v in arr:
        if _is_missing(v, missing_values):
            missing += 1
            continue
        try:
            f = float(v)
        except (TypeError, ValueError):
            raise DataError(f"unrecognised response code {v!r}") from None
        if f != int(f):
            raise DataError(f"response codes must be integers, got {v!r}")
        cats.append(int(f))
    K = n_categories if n_categories is not None else max(max(cats, default=2), 2)
    if not 2 <= K <= MAX_K:
        raise DataError(f"K must lie in [2, {MAX_K}]")
    bad = [c for c in cats if not 1 <= c <= K]
    if bad:
        raise OutOfRangeCategory(f"response {bad[0]} outside 1..{K}")
    counts = np.bincount(np.asarray(cats, dtype=int) - 1, minlength=K) if cats else np.zeros(K, int)
    return ObservedSample(tuple(int(c) for c in counts), missing)


def check_distribution(probs) -> OrdinalDistribution:
    if isinstance(probs, OrdinalDistribution):
        return probs
    return make_distribution(probs)


def check_response_rate(p) -> float | None:
    if p is None:
        return None
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DataError(f"response rate {p} outside [0, 1]")
    return p

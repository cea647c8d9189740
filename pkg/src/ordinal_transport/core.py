"""Domain types and elementary operations on ordinal distributions.

Categories are 0-indexed here; everything user-facing (reports, CLI,
figures) labels them 1..K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleBox,
    KTooLarge,
    NegativeMass,
    NoObservations,
    NotNormalized,
    OutOfRange,
)

TOL = 1e-9
NEG_TOL = 1e-12
MAX_K = 32


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_k(k: int) -> None:
    if k < 2:
        raise DimensionMismatch(f"need at least 2 categories, got {k}")
    if k > MAX_K:
        raise KTooLarge(f"K={k} exceeds the supported maximum of {MAX_K}")


@dataclass(frozen=True, eq=False)
class OrdinalDistribution:
    """Probability vector over ``K`` ordered categories."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen(self.probs))

    @property
    def K(self) -> int:
        return self.probs.shape[0]

    def __len__(self):
        return self.K

    def __eq__(self, other):
        if not isinstance(other, OrdinalDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"OrdinalDistribution({np.round(self.probs, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class StepCdf:
    """Cumulative shares ``F(k)`` for ``k = 1..K``."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if np.any(np.diff(values) < -NEG_TOL):
            raise OutOfRange("CDF must be nondecreasing")
        if abs(values[-1] - 1.0) > TOL:
            raise NotNormalized(f"CDF must end at 1, got {values[-1]!r}")
        object.__setattr__(self, "values", values)

    @property
    def thresholds(self) -> np.ndarray:
        """The K-1 interior values; the terminal 1 carries no information."""
        return self.values[:-1]


@dataclass(frozen=True, eq=False)
class Coupling:
    """Joint mass matrix; ``mass[i, j]`` moves from origin ``i`` to destination ``j``."""

    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != 2 or mass.shape[0] != mass.shape[1]:
            raise DimensionMismatch(f"coupling must be square, got shape {mass.shape}")
        _check_k(mass.shape[0])
        if np.any(mass < -NEG_TOL):
            raise NegativeMass("coupling has negative entries")
        if abs(mass.sum() - 1.0) > TOL:
            raise NotNormalized(f"coupling mass sums to {mass.sum()!r}, not 1")
        object.__setattr__(self, "mass", _frozen(np.clip(mass, 0.0, None)))

    @property
    def K(self) -> int:
        return self.mass.shape[0]

    def check_marginals(self, source: OrdinalDistribution, target: OrdinalDistribution,
                        tol: float = TOL) -> bool:
        rows, cols = self.mass.sum(axis=1), self.mass.sum(axis=0)
        return (np.allclose(rows, source.probs, atol=tol, rtol=0)
                and np.allclose(cols, target.probs, atol=tol, rtol=0))


@dataclass(frozen=True)
class ObservedSample:
    """Aggregated cross-section: respondents per category plus nonresponse."""

    counts: tuple
    missing: int = 0

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts) or self.missing < 0:
            raise NegativeMass("counts must be nonnegative")
        _check_k(len(counts))
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "missing", int(self.missing))
        if self.n < 1:
            raise OutOfRange("sample must contain at least one unit")

    @property
    def K(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return sum(self.counts) + self.missing

    @property
    def n_observed(self) -> int:
        return sum(self.counts)

    @property
    def response_rate(self) -> float:
        return self.n_observed / self.n

    def observed_distribution(self) -> OrdinalDistribution:
        if self.n_observed == 0:
            raise NoObservations("every unit in the sample is missing")
        counts = np.asarray(self.counts, dtype=float)
        return OrdinalDistribution(counts / counts.sum())


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise OutOfRange(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value, tol: float = 0.0) -> bool:
        if isinstance(value, Interval):
            return self.lo - tol <= value.lo and value.hi <= self.hi + tol
        return self.lo - tol <= value <= self.hi + tol

    def __iter__(self) -> Iterator[float]:
        yield self.lo
        yield self.hi


@dataclass(frozen=True, eq=False)
class MarginalBox:
    """Per-category bounds ``lower <= gamma <= upper`` intersected with the simplex.

    Boxes built from a sample have ``upper - lower`` equal to the missing
    share in every category, so the set equals ``lower + missing_share * m``
    for ``m`` ranging over the simplex.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower, upper = _frozen(self.lower), _frozen(self.upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionMismatch("lower and upper bounds must be vectors of equal length")
        _check_k(lower.shape[0])
        if np.any(lower < -NEG_TOL) or np.any(upper > 1 + TOL) or np.any(lower > upper + NEG_TOL):
            raise OutOfRange("box bounds must satisfy 0 <= lower <= upper <= 1")
        if lower.sum() > 1 + TOL or upper.sum() < 1 - TOL:
            raise InfeasibleBox(
                f"box misses the simplex: sum(lower)={lower.sum():.12g}, sum(upper)={upper.sum():.12g}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def K(self) -> int:
        return self.lower.shape[0]

    @property
    def missing_share(self) -> float:
        return float(1.0 - self.lower.sum())

    def contains(self, d: OrdinalDistribution | np.ndarray, tol: float = TOL) -> bool:
        p = d.probs if isinstance(d, OrdinalDistribution) else np.asarray(d, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol)
                    and abs(p.sum() - 1) <= tol)


@dataclass(frozen=True, eq=False)
class CellBoundsMatrix:
    """K x K matrix of intervals stored as two arrays."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _frozen(self.lo), _frozen(self.hi)
        if lo.shape != hi.shape or lo.ndim != 2 or lo.shape[0] != lo.shape[1]:
            raise DimensionMismatch("cell bounds must be two square matrices of equal shape")
        if np.any(lo > hi + NEG_TOL) or np.any(lo < -NEG_TOL) or np.any(hi > 1 + NEG_TOL):
            raise OutOfRange("cell bounds must satisfy 0 <= lo <= hi <= 1")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def K(self) -> int:
        return self.lo.shape[0]

    def cell(self, i: int, j: int) -> Interval:
        return Interval(float(self.lo[i, j]), float(self.hi[i, j]))

    def contains(self, matrix, tol: float = TOL) -> bool:
        """Cellwise containment of a mass matrix or of another bounds matrix."""
        if isinstance(matrix, CellBoundsMatrix):
            return bool(np.all(self.lo - tol <= matrix.lo) and np.all(matrix.hi <= self.hi + tol))
        if isinstance(matrix, Coupling):
            matrix = matrix.mass
        m = np.asarray(matrix, dtype=float)
        return bool(np.all(self.lo - tol <= m) and np.all(m <= self.hi + tol))


def make_distribution(probs: Sequence[float]) -> OrdinalDistribution:
    """Validate ``probs`` as a point of the simplex.

    Sums within ``1e-9`` of one are renormalized; anything further off is
    rejected rather than silently rescaled.
    """
    p = np.array(probs, dtype=float).ravel()
    _check_k(p.shape[0])
    if not np.all(np.isfinite(p)):
        raise NotNormalized("probabilities must be finite")
    if np.any(p < -NEG_TOL):
        raise NegativeMass(f"negative probability mass: {p.min()!r}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > TOL:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    if abs(total - 1.0) > NEG_TOL:
        # leave float-rounding noise alone so repeated validation is a no-op
        p = p / total
    return OrdinalDistribution(p)


def cdf(d: OrdinalDistribution) -> StepCdf:
    values = np.cumsum(d.probs)
    values[-1] = 1.0
    return StepCdf(values)


def marginals(c: Coupling) -> tuple[OrdinalDistribution, OrdinalDistribution]:
    """Row sums (origin) and column sums (destination) of a coupling."""
    return make_distribution(c.mass.sum(axis=1)), make_distribution(c.mass.sum(axis=0))


def make_coupling(mass, source: OrdinalDistribution | None = None,
                  target: OrdinalDistribution | None = None) -> Coupling:
    c = Coupling(mass)
    if source is not None and target is not None and not c.check_marginals(source, target):
        raise NotNormalized("coupling marginals do not reproduce the supplied distributions")
    return c


def check_same_k(*objs) -> int:
    ks = {o.K for o in objs}
    if len(ks) != 1:
        raise DimensionMismatch(f"category counts differ: {sorted(ks)}")
    return ks.pop()

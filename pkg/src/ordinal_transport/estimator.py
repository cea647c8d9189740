"""scikit-learn style front end.

>>> est = OrdinalTransportBounds().fit([1, 1, 2, 3, None], [2, 3, 3, 3, 4])
>>> est.interval_.d_low <= est.interval_.d_up
True
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import TOL, ObservedSample, check_same_k
from .inference import BootstrapConfig, bootstrap
from .io import DEFAULT_MISSING_CODES
from .partialid import (
    Endpoint,
    cdf_bounds,
    discrepancy_endpoints,
    endpoint_coupling_bounds,
    identified_set,
)
from .transport import (
    discrepancy,
    frechet_cell_bounds,
    max_mobility,
    min_cost_coupling,
    normalized_discrepancy,
    optimal_cell_bounds,
)
from .validation import check_response_rate, check_responses


class OrdinalTransportBounds(BaseEstimator):
    """Sharp bounds on ordinal distributional change between two cross-sections.

    Parameters
    ----------
    n_categories : int or None
        Number of ordered categories K. Inferred from the data when None.
    missing_values : tuple of str
        Response codes treated as item nonresponse.
    source_response_rate, target_response_rate : float or None
        Known response probabilities; the empirical rate is used when None.
    couplings : bool
        Compute endpoint-conditioned cell bounds (2K^2 LPs per endpoint).
    n_bootstrap : int
        Bootstrap replications; 0 skips inference.
    alpha : float
        Confidence sets have nominal level 1 - alpha.
    random_state : int
        Seed for the bootstrap.
    n_jobs : int or None
        Worker processes for the bootstrap (0 = all cores, None = read the
        ``ORDINAL_TRANSPORT_THREADS`` environment variable).

    Attributes
    ----------
    source_sample_, target_sample_ : ObservedSample
    source_box_, target_box_ : MarginalBox
    interval_ : IdentifiedInterval
    endpoint_couplings_ : dict of Endpoint -> EndpointCouplingBounds
    inference_ : InferenceReport or None
    """

    def __init__(self, n_categories=None, missing_values=DEFAULT_MISSING_CODES,
                 source_response_rate=None, target_response_rate=None, couplings=True,
                 n_bootstrap=0, alpha=0.05, random_state=0, n_jobs=None):
        self.n_categories = n_categories
        self.missing_values = missing_values
        self.source_response_rate = source_response_rate
        self.target_response_rate = target_response_rate
        self.couplings = couplings
        self.n_bootstrap = n_bootstrap
        self.alpha = alpha
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, source, target):
        """Fit on two samples of responses (or two ``ObservedSample`` objects)."""
        K = self.n_categories
        if K is None:
            given = [o.K for o in (source, target) if isinstance(o, ObservedSample)]
            if given:
                K = given[0]
            else:
                # a common K across both response vectors
                K = max(check_responses(source, None, self.missing_values).K,
                        check_responses(target, None, self.missing_values).K)
        s = check_responses(source, K, self.missing_values)
        t = check_responses(target, K, self.missing_values)
        self.n_categories_ = check_same_k(s, t)
        p = check_response_rate(self.source_response_rate)
        q = check_response_rate(self.target_response_rate)

        self.source_sample_, self.target_sample_ = s, t
        self.source_box_ = identified_set(s, p)
        self.target_box_ = identified_set(t, q)
        self.interval_ = discrepancy_endpoints(self.source_box_, self.target_box_)
        self.endpoint_couplings_ = {}
        if self.couplings:
            self.endpoint_couplings_ = {
                e: endpoint_coupling_bounds(self.source_box_, self.target_box_, e, self.interval_)
                for e in Endpoint}
        self.inference_ = None
        if self.n_bootstrap:
            cfg = BootstrapConfig(int(self.n_bootstrap), float(self.alpha), int(self.random_state),
                                  self.n_jobs)
            self.inference_ = bootstrap(s, t, cfg, cells=bool(self.couplings), p=p, q=q)
        return self

    @property
    def point_identified_(self) -> bool:
        check_is_fitted(self, "interval_")
        return self.source_box_.missing_share <= TOL and self.target_box_.missing_share <= TOL

    def observed_benchmarks(self) -> dict | None:
        """Point-identified objects on the observed-respondent distributions."""
        check_is_fitted(self, "interval_")
        s, t = self.source_sample_, self.target_sample_
        if s.n_observed == 0 or t.n_observed == 0:
            return None
        mu, nu = s.observed_distribution(), t.observed_distribution()
        m_val, m_coupling = max_mobility(mu, nu)
        out = {
            "source": mu,
            "target": nu,
            "discrepancy": discrepancy(mu, nu),
            "min_cost_coupling": min_cost_coupling(mu, nu),
            "max_mobility": m_val,
            "max_mobility_coupling": m_coupling,
            "frechet": frechet_cell_bounds(mu, nu),
        }
        if self.couplings:
            out["optimal_cell_bounds"] = optimal_cell_bounds(mu, nu)
        return out

    def cdf_bounds(self):
        check_is_fitted(self, "interval_")
        return cdf_bounds(self.source_box_), cdf_bounds(self.target_box_)

    def normalized_interval(self):
        check_is_fitted(self, "interval_")
        K = self.n_categories_
        return (normalized_discrepancy(self.interval_.d_low, K),
                normalized_discrepancy(self.interval_.d_up, K))

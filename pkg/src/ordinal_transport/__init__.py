"""Bounds on distributional change between two ordinal cross-sections."""

import types as _types

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CellBoundsMatrix,
    Coupling,
    Interval,
    MarginalBox,
    ObservedSample,
    OrdinalDistribution,
    StepCdf,
    cdf,
    make_coupling,
    make_distribution,
    marginals,
)
from .errors import (  # noqa: E402
    DataError,
    InfeasibleEndpoint,
    LpFailure,
    OrdinalTransportError,
)
from .estimator import OrdinalTransportBounds  # noqa: E402
from .inference import (  # noqa: E402
    BootstrapConfig,
    InferenceReport,
    bootstrap,
    confidence_cell_bounds,
    confidence_set_d,
    simultaneous_cell_bounds,
)
from .partialid import (  # noqa: E402
    Endpoint,
    IdentifiedInterval,
    cdf_bounds,
    discrepancy_endpoints,
    endpoint_coupling_bounds,
    identified_set,
)
from .transport import (  # noqa: E402
    discrepancy,
    frechet_cell_bounds,
    max_mobility,
    min_cost_coupling,
    normalized_discrepancy,
    optimal_cell_bounds,
    transport_cost,
)

__all__ = [n for n, v in list(globals().items())
           if not n.startswith("_") and not isinstance(v, _types.ModuleType)]

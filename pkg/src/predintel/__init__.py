"""predintel: measure the predictive intelligence of agents in their own
environments, with maze and time-series reference agents."""

from .complexity import (
    CompressorSpec,
    DEFAULT_COMPRESSOR_ID,
    get_compressor,
    k_hat,
    k_ratio,
    serialize_maze,
    serialize_predictions,
    serialize_series,
)
from .measure import (
    combine_umwelts,
    degree_of_match,
    event_pm,
    hellinger,
    intelligence,
    measure,
    pm_continuous,
    pm_discrete,
    sum_pm,
    two_tailed_t_p,
    weighted_pm,
)
from .types import (
    CategoricalDistribution,
    ContinuousEnsemblePrediction,
    LabelMismatchError,
    MeasurementResult,
    PredictionEvent,
    UmweltRecord,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "CategoricalDistribution",
    "CompressorSpec",
    "ContinuousEnsemblePrediction",
    "DEFAULT_COMPRESSOR_ID",
    "LabelMismatchError",
    "MeasurementResult",
    "PredictionEvent",
    "UmweltRecord",
    "ValidationError",
    "combine_umwelts",
    "degree_of_match",
    "event_pm",
    "get_compressor",
    "hellinger",
    "intelligence",
    "k_hat",
    "k_ratio",
    "measure",
    "pm_continuous",
    "pm_discrete",
    "serialize_maze",
    "serialize_predictions",
    "serialize_series",
    "sum_pm",
    "two_tailed_t_p",
    "weighted_pm",
]

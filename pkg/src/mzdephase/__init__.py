"""Simulator and analysis toolkit for a Mach-Zehnder interferometer whose
polarization qubit dephases through Gaussian frequency noise on the arms and
output paths: exact dephasing dynamics, information backflow detection,
CP-divisibility of the conditional output dynamics, and estimation of the
in-interferometer optical path difference from output-side memory effects."""

from .analysis import (
    LOCATIONS,
    TraceDistanceSeries,
    backflow_intervals,
    blp_measure,
    estimate_interaction_time_difference,
    lambda_peak,
    trace_distance_series,
)
from .channels import single_path_kappa, single_path_state
from .core import (
    DensityMatrix,
    FrequencyDistribution,
    InteractionWindow,
    InterferometerConfig,
    PolarizationState,
    effective_time,
    kappa_of_delay,
    pure_density,
    trace_distance,
)
from .errors import (
    ConfigError,
    EstimatorOutOfRegime,
    ImpossibleOutcome,
    MzDephaseError,
    PeakNotFound,
    ZeroCoherenceFactor,
)
from .interferometer import (
    OutputFunctions,
    averaged_state_outside,
    conditional_state_outside,
    interference_kappas,
    joint_state_inside,
    lambda_function,
    path_probabilities,
    path_state_inside,
)
from .maps import (
    QuantumOperation,
    TraceCharacter,
    conditional_operation,
    divisibility_scan,
    is_completely_positive,
    kraus_conditional,
    propagator,
    propagator_from_coherence_factors,
    trace_character,
)
from .oracle import FrequencyGrid, OracleDeviation, oracle_compare, oracle_state

__version__ = "0.1.0"

__all__ = [
    "LOCATIONS",
    "TraceDistanceSeries",
    "backflow_intervals",
    "blp_measure",
    "estimate_interaction_time_difference",
    "lambda_peak",
    "trace_distance_series",
    "single_path_kappa",
    "single_path_state",
    "DensityMatrix",
    "FrequencyDistribution",
    "InteractionWindow",
    "InterferometerConfig",
    "PolarizationState",
    "effective_time",
    "kappa_of_delay",
    "pure_density",
    "trace_distance",
    "ConfigError",
    "EstimatorOutOfRegime",
    "ImpossibleOutcome",
    "MzDephaseError",
    "PeakNotFound",
    "ZeroCoherenceFactor",
    "OutputFunctions",
    "averaged_state_outside",
    "conditional_state_outside",
    "interference_kappas",
    "joint_state_inside",
    "lambda_function",
    "path_probabilities",
    "path_state_inside",
    "QuantumOperation",
    "TraceCharacter",
    "conditional_operation",
    "divisibility_scan",
    "is_completely_positive",
    "kraus_conditional",
    "propagator",
    "propagator_from_coherence_factors",
    "trace_character",
    "FrequencyGrid",
    "OracleDeviation",
    "oracle_compare",
    "oracle_state",
]

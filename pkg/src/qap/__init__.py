"""Numerical realization of a quantum action principle for the harmonic
oscillator: the coefficient ODE flow, the action eigenvalue and its
initial-data constraint, extremization over initial data, and exact
classical-limit oracles."""

__version__ = "0.1.0"

from .action import (
    EigenvalueReport,
    FunctionalValue,
    composite_simpson,
    constraint_residual,
    eigenvalue,
    functional_values,
    simpson_accumulators,
)
from .classical import (
    ClassicalParams,
    lambda_classical,
    lambda_star,
    s1_closed,
    s2_closed,
    s10_star,
    xtilde,
)
from .dynamics import (
    SolutionGrid,
    convergence_order,
    integrate,
    rhs,
)
from .errors import (
    BlowUpError,
    ConfigError,
    DegenerateProbeError,
    FDFailureError,
    IncompleteGridError,
    LengthMismatchError,
    QapError,
    ResonanceError,
    ResonanceWarning,
    SingularityError,
    ValidationError,
    ZeroFrequencyError,
    ZeroStiffnessError,
)
from .extremize import (
    ExtremumResult,
    HessianSignature,
    StationarityReport,
    objective,
    optimize,
    stationarity_check,
)
from .model import (
    CoefficientState,
    InitialData,
    OscillatorSpec,
    S20_to_t0,
    omega0,
    resonant,
    t0_to_S20,
    validate,
    validation_errors,
)

__all__ = [
    "BlowUpError",
    "ClassicalParams",
    "CoefficientState",
    "ConfigError",
    "DegenerateProbeError",
    "EigenvalueReport",
    "ExtremumResult",
    "FDFailureError",
    "FunctionalValue",
    "HessianSignature",
    "IncompleteGridError",
    "InitialData",
    "LengthMismatchError",
    "OscillatorSpec",
    "QapError",
    "ResonanceError",
    "ResonanceWarning",
    "S20_to_t0",
    "SingularityError",
    "SolutionGrid",
    "StationarityReport",
    "ValidationError",
    "ZeroFrequencyError",
    "ZeroStiffnessError",
    "composite_simpson",
    "constraint_residual",
    "convergence_order",
    "eigenvalue",
    "functional_values",
    "integrate",
    "lambda_classical",
    "lambda_star",
    "objective",
    "omega0",
    "optimize",
    "resonant",
    "rhs",
    "s10_star",
    "s1_closed",
    "s2_closed",
    "simpson_accumulators",
    "stationarity_check",
    "t0_to_S20",
    "validate",
    "validation_errors",
    "xtilde",
]

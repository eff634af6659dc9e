"""Cavity cooling of a polarizable particle in a pumped ring cavity.

Tiers, from cheapest to most complete: classical mean-field dynamics
(:mod:`ringcav.classical`), linear sideband theory (:mod:`ringcav.linear`),
exact second moments of the linearized model (:mod:`ringcav.moments`) and
quantum trajectories with a density-matrix oracle (:mod:`ringcav.quantum`).
"""

from .errors import (
    ConfigError,
    DegenerateFitError,
    DimensionGuardError,
    HeatingRegimeError,
    IntegrationError,
    NoSteadyStateError,
    RingCavError,
    TruncationError,
    UntrappedError,
)
from .params import (
    DerivedParams,
    SystemParams,
    ValidityReport,
    derive_params,
    eta_for_optimal_trap,
    optimal_params,
    optimal_trap_frequency,
    validity_report,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DegenerateFitError", "DimensionGuardError", "HeatingRegimeError",
    "IntegrationError", "NoSteadyStateError", "RingCavError", "TruncationError",
    "UntrappedError", "DerivedParams", "SystemParams", "ValidityReport", "derive_params",
    "eta_for_optimal_trap", "optimal_params", "optimal_trap_frequency", "validity_report",
    "__version__",
]

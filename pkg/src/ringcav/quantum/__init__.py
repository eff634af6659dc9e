from .space import HilbertSpace, basis
from .model import (
    JumpOp,
    QuantumModel,
    Treatment,
    build_model,
    harmonic_state,
    hot_momentum,
    momentum_state,
    trap_eigenbasis,
    trap_level_state,
)
from .observables import expectation_rho, expectation_states, observables, position_spread
from .mcwf import (
    EnsembleStats,
    Propagator,
    TrajectoryError,
    TrajectoryRecord,
    make_propagator,
    mcwf_trajectory,
    run_ensemble,
    split_seed,
)
from .lindblad import LindbladSeries, lindblad_evolve, lindblad_steady_state, liouvillian

__all__ = [
    "HilbertSpace", "basis", "JumpOp", "QuantumModel", "Treatment", "build_model",
    "harmonic_state", "hot_momentum", "momentum_state", "trap_eigenbasis", "trap_level_state",
    "expectation_rho", "expectation_states", "observables", "position_spread",
    "EnsembleStats", "Propagator", "TrajectoryError", "TrajectoryRecord", "make_propagator",
    "mcwf_trajectory", "run_ensemble", "split_seed",
    "LindbladSeries", "lindblad_evolve", "lindblad_steady_state", "liouvillian",
]

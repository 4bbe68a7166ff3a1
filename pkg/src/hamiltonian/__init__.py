from .pulses import PULSE_SHAPES, PulseProfile, pulse_derivative, pulse_value
from .builder import (
    CAVITY_MODES,
    HamiltonianParts,
    SimulationConfig,
    build_h_eff,
    build_h_int,
    check_basis,
    coupled_manifold,
    default_simulation_config,
    hamiltonian_parts,
    initial_vector,
    is_hermitian,
    reachable_states,
    state_vector,
)

__all__ = [
    "PULSE_SHAPES",
    "PulseProfile",
    "pulse_derivative",
    "pulse_value",
    "CAVITY_MODES",
    "HamiltonianParts",
    "SimulationConfig",
    "build_h_eff",
    "build_h_int",
    "check_basis",
    "coupled_manifold",
    "default_simulation_config",
    "hamiltonian_parts",
    "initial_vector",
    "is_hermitian",
    "reachable_states",
    "state_vector",
]

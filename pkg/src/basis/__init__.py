from .angular import LevelScheme, SIGMAS, cg_coefficient, magnetic_numbers
from .hilbert_space import (
    EXCITED,
    GROUND,
    BasisState,
    OperatorLibrary,
    OperatorMatrix,
    SystemBasis,
    atomic_lowering,
    dagger,
    enumerate_basis,
    format_state,
    mode_annihilation,
)

__all__ = [
    "LevelScheme",
    "SIGMAS",
    "cg_coefficient",
    "magnetic_numbers",
    "EXCITED",
    "GROUND",
    "BasisState",
    "OperatorLibrary",
    "OperatorMatrix",
    "SystemBasis",
    "atomic_lowering",
    "dagger",
    "enumerate_basis",
    "format_state",
    "mode_annihilation",
]

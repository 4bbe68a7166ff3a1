from .records import JumpEvent, TrajectoryRecord
from .collapse import (
    CAVITY,
    SPONTANEOUS,
    CollapseChannel,
    CollapseSet,
    detector_collapse_set,
    dissipator_sum,
    dynamical_manifold,
    restrict_operator,
    standard_collapse_set,
)
from .mcwf import TrajectorySolver, evolve_trajectory, make_generator, output_grid
from .ensemble import EnsembleResult, run_ensemble, trajectory_seed
from .master_equation import MasterEquationResult, solve_master_equation

__all__ = [
    "JumpEvent",
    "TrajectoryRecord",
    "CAVITY",
    "SPONTANEOUS",
    "CollapseChannel",
    "CollapseSet",
    "detector_collapse_set",
    "dissipator_sum",
    "dynamical_manifold",
    "restrict_operator",
    "standard_collapse_set",
    "TrajectorySolver",
    "evolve_trajectory",
    "make_generator",
    "output_grid",
    "EnsembleResult",
    "run_ensemble",
    "trajectory_seed",
    "MasterEquationResult",
    "solve_master_equation",
]

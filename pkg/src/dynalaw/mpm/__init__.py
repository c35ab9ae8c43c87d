"""3D MLS-MPM simulator with pluggable elastic/plastic laws."""

from .config import DET_F_MIN, SLIP_WALLS, STICKY_WALLS, V_MAX, SimConfig
from .particles import Particles, ShapeOutOfDomain, lattice_points, seed_particles
from .runner import final_state, law_digest, run_sim
from .solver import (
    Grid,
    SimulationFailure,
    apply_plasticity,
    g2p,
    grid_step,
    p2g,
    step,
    update_covariance,
)
from .trajectory import Trajectory, TrajectoryFormatError

__all__ = [
    "DET_F_MIN",
    "Grid",
    "Particles",
    "SLIP_WALLS",
    "STICKY_WALLS",
    "ShapeOutOfDomain",
    "SimConfig",
    "SimulationFailure",
    "Trajectory",
    "TrajectoryFormatError",
    "V_MAX",
    "apply_plasticity",
    "final_state",
    "g2p",
    "grid_step",
    "law_digest",
    "lattice_points",
    "p2g",
    "run_sim",
    "seed_particles",
    "step",
    "update_covariance",
]

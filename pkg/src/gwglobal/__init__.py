"""Globally optimal Gromov-Wasserstein matching of small-dimensional point clouds."""

from .assignment import lap_solve
from .baselines import brute_force, local_search, multi_start
from .core import (
    Coupling,
    GWInstance,
    PointCloud,
    build_instance,
    distance_matrix,
    gw_value_lowrank,
    gw_value_quadratic,
    project,
    verify_identity,
)
from .generators import GeneratorSpec, generate, instance_pair
from .solver import SolverConfig, SolveResult, solve

__version__ = "0.1.0"

__all__ = [
    "Coupling", "GWInstance", "GeneratorSpec", "PointCloud", "SolveResult", "SolverConfig",
    "brute_force", "build_instance", "distance_matrix", "generate", "gw_value_lowrank",
    "gw_value_quadratic", "instance_pair", "lap_solve", "local_search", "multi_start",
    "project", "solve", "verify_identity",
]

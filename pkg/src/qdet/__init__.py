"""Quantum detector characterisation: optimal signal states for a given POVM.

The detector is fixed and the sender chooses the signal states. Solvers cover
minimum Bayes cost, unambiguous identification and the capacity of the
measurement.
"""
from ._backend import BACKEND
from .bayes import BayesSolution, RegionMap, binary_success, map_regions, min_error, solve_bayes, trivial_threshold
from .capacity import (
    CapacityResult,
    GroupAction,
    capacity,
    capacity_binary,
    capacity_commuting,
    capacity_covariant,
    capacity_general,
    holevo_of_rescaled_povm,
    subentropy_lower_bound,
)
from .errors import (
    CapExceededError,
    InfeasibleError,
    NotCompleteError,
    NotPositiveError,
    QdetError,
    ValidationError,
)
from .information import binary_capacity, blahut_arimoto, mutual_information, subentropy
from .linalg import eig_hermitian, kernel_projector, lambda_max, spread
from .povm import Ensemble, Povm, born_matrix, enumerate_groupings, group_povm, make_ensemble, validate_povm
from .sic import analytic_capacity, sic_qubit, tetrahedral_group, verify_capacity_inequality
from .unambiguous import UnambiguousSolution, feasible_groupings, solve_unambiguous

__all__ = [
    "BACKEND",
    "BayesSolution",
    "CapExceededError",
    "CapacityResult",
    "Ensemble",
    "GroupAction",
    "InfeasibleError",
    "NotCompleteError",
    "NotPositiveError",
    "Povm",
    "QdetError",
    "RegionMap",
    "UnambiguousSolution",
    "ValidationError",
    "analytic_capacity",
    "binary_capacity",
    "binary_success",
    "blahut_arimoto",
    "born_matrix",
    "capacity",
    "capacity_binary",
    "capacity_commuting",
    "capacity_covariant",
    "capacity_general",
    "eig_hermitian",
    "enumerate_groupings",
    "feasible_groupings",
    "group_povm",
    "holevo_of_rescaled_povm",
    "kernel_projector",
    "lambda_max",
    "make_ensemble",
    "map_regions",
    "min_error",
    "mutual_information",
    "sic_qubit",
    "solve_bayes",
    "solve_unambiguous",
    "spread",
    "subentropy",
    "subentropy_lower_bound",
    "tetrahedral_group",
    "trivial_threshold",
    "validate_povm",
    "verify_capacity_inequality",
]

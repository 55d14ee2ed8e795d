"""Partitioned trace distances between quantum states.

``D_k(rho, sigma)`` is half the Ky Fan k-norm of ``rho - sigma``; ``D_d`` is
the ordinary trace distance.  The package computes these distances, their
classical counterparts on measurement statistics, and checks how they behave
under measurements and quantum channels.
"""
from .channels import (
    ContractivityReport,
    KrausChannel,
    apply,
    apply_unnormalized,
    build_channel,
    coarse_graining,
    contractivity_report,
    depolarizing,
    measurement_channel,
    random_bistochastic_channel,
    random_subunital_channel,
    random_tp_channel,
)
from .distances import (
    DistanceProfile,
    JordanDecomposition,
    classical_partitioned_distance,
    classical_profile,
    distance_profile,
    jordan_decomposition,
    ky_fan_norm,
    max_over_constrained_operators,
    optimal_projectors,
    partitioned_distance,
    top_eigenvalue_sum,
    trace_distance,
)
from .errors import KyFanError, ParseError, UsageError, ValidationError
from .harness import ProbeVerdict, SuiteReport, blackbox_probe, run_suite
from .linalg import hermitian_eigensystem, singular_values
from .majorization import check_corollary_51, check_gap_submajorization, majorized, weakly_submajorized
from .measurements import Povm, measure_pair, optimal_pvm, random_rank_one_povm, validate_povm, verify_measurement_bound, verify_relt0
from .sampling import random_density_matrix, random_pure_state, random_unitary
from .states import DensityMatrix, bloch_from_qubit, pure_state, qubit_from_bloch, validate_density

__version__ = "0.1.0"

__all__ = [
    "apply",
    "apply_unnormalized",
    "blackbox_probe",
    "bloch_from_qubit",
    "build_channel",
    "check_corollary_51",
    "check_gap_submajorization",
    "classical_partitioned_distance",
    "classical_profile",
    "coarse_graining",
    "contractivity_report",
    "ContractivityReport",
    "DensityMatrix",
    "depolarizing",
    "distance_profile",
    "DistanceProfile",
    "hermitian_eigensystem",
    "jordan_decomposition",
    "JordanDecomposition",
    "KrausChannel",
    "ky_fan_norm",
    "KyFanError",
    "majorized",
    "max_over_constrained_operators",
    "measure_pair",
    "measurement_channel",
    "optimal_projectors",
    "optimal_pvm",
    "ParseError",
    "partitioned_distance",
    "Povm",
    "ProbeVerdict",
    "pure_state",
    "qubit_from_bloch",
    "random_bistochastic_channel",
    "random_density_matrix",
    "random_pure_state",
    "random_rank_one_povm",
    "random_subunital_channel",
    "random_tp_channel",
    "random_unitary",
    "run_suite",
    "singular_values",
    "SuiteReport",
    "top_eigenvalue_sum",
    "trace_distance",
    "UsageError",
    "validate_density",
    "validate_povm",
    "ValidationError",
    "verify_measurement_bound",
    "verify_relt0",
    "weakly_submajorized",
]

"""Multi-mode GKP codes under Gaussian displacement noise.

Lattice primitives, code-family constructors, maximum-likelihood decoders
(brute force, partition function, tensor network) plus a hard-decision
baseline, channel-rate mathematics, and a Monte Carlo sweep harness.
"""

from .channel import NoiseSample, SyndromeRecord, candidate_error, sample_shift
from .codes import (CodeFamily, GkpCodeLayout, UnrotatedEmbedding, build_layout,
                    embed_rotated_into_unrotated, hexagonal_inner_symplectic,
                    z_side_layout)
from .decoders import (DecodeResult, decode_baseline, decode_brute_force,
                       decode_partition_function, decode_tensor_network)
from .harness import (CellResult, ExperimentConfig, SweepResult, crossing_point,
                      optimal_distance_rate, plateau_check, run_sweep, wilson_interval)
from .lattice import (GaussianNoiseModel, LogicalClass, compose, log_gaussian_density,
                      logical_class_of, omega)
from .rates import (GaussianState, PauliChannelEstimate, capacity_bounds, entropy_g,
                    gaussian_entropy, hashing_rate, pauli_complementary_entropy,
                    thermal_coherent_information)
from .weights import CosetWeightTable, tau_general, tau_square

__version__ = "0.1.0"

__all__ = [
    "CodeFamily", "GkpCodeLayout", "UnrotatedEmbedding", "build_layout",
    "embed_rotated_into_unrotated", "hexagonal_inner_symplectic", "z_side_layout",
    "NoiseSample", "SyndromeRecord", "candidate_error", "sample_shift",
    "DecodeResult", "decode_baseline", "decode_brute_force",
    "decode_partition_function", "decode_tensor_network",
    "CellResult", "ExperimentConfig", "SweepResult", "crossing_point",
    "optimal_distance_rate", "plateau_check", "run_sweep", "wilson_interval",
    "GaussianNoiseModel", "LogicalClass", "compose", "log_gaussian_density",
    "logical_class_of", "omega",
    "GaussianState", "PauliChannelEstimate", "capacity_bounds", "entropy_g", "gaussian_entropy",
    "hashing_rate", "pauli_complementary_entropy", "thermal_coherent_information",
    "CosetWeightTable", "tau_general", "tau_square",
    "__version__",
]

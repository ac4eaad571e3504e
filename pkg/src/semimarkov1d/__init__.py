"""Green's functions and path statistics of semi-Markovian walks on chains.

The package computes Laplace-domain occupation densities (Green's functions),
first-arrival transforms, and per-path-class probability densities for random
walks with arbitrary per-state, per-direction waiting-time densities on a
finite one-dimensional chain, together with independent oracles (explicit path
enumeration, transfer-matrix resolvents, Markov generators), numerical Laplace
inversion, and stochastic simulation for end-to-end validation.
"""

from .chain import (Chain, ReducedLattice, StateDensities, build_chain,
                    make_chain, reduce_lattice, survival_transform)
from .config import ChainSpec, TransitionSpec, parse_config
from .densities import (DeterministicDelay, Erlang, Exponential,
                        HyperExponential, WaitingTimeDensity, laplace_wt)
from .errors import (AccuracyWarning, BudgetError, DomainError, EmptyInput,
                     FallbackRequired, InsufficientSamples, MethodError,
                     ModelError, NonConvergence, NormalizationError,
                     OrderError, ParamError, ParseError, SchemaError,
                     SemiMarkovError, SingularError, TopologyError)
from .laplace import (HAlgorithm, arrival_transform, bond_factor, bond_factors,
                      gamma_direct, green, h_coeff, phi, phi_by_recurrence,
                      phi_reduced)
from .oracle import (PathList, TransferMatrix, build_transfer_matrix,
                     enumerate_paths, markov_generator_green, path_weight_sum,
                     resolvent_green, transfer_matrix_w)
from .pathpdf import (PathPdfTable, TruncationPolicy, generating_function,
                      lower_bound_a, path_pdf_explicit, path_pdf_recursive,
                      series_arrival)
from .streams import UniformStream, stream_base, uniform_at
from .timedomain import (GaverStehfest, GreenEstimator, HistogramEstimate,
                         PathPdfEstimator, Talbot, Trajectory, estimate_green,
                         estimate_path_pdf, invert_laplace, simulate_walk,
                         walk_ensemble)
from .verify import CheckResult, run_verification

__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning", "BudgetError", "Chain", "ChainSpec", "CheckResult",
    "DeterministicDelay", "DomainError", "EmptyInput", "Erlang",
    "Exponential", "FallbackRequired", "GaverStehfest", "GreenEstimator",
    "HAlgorithm", "HistogramEstimate", "HyperExponential",
    "InsufficientSamples", "MethodError", "ModelError", "NonConvergence",
    "NormalizationError", "OrderError", "ParamError", "ParseError",
    "PathList", "PathPdfEstimator", "PathPdfTable", "ReducedLattice",
    "SchemaError", "SemiMarkovError", "SingularError", "StateDensities",
    "Talbot", "TopologyError", "Trajectory", "TransferMatrix",
    "TransitionSpec", "TruncationPolicy", "UniformStream",
    "WaitingTimeDensity", "arrival_transform", "bond_factor", "bond_factors",
    "build_chain", "build_transfer_matrix", "enumerate_paths",
    "estimate_green", "estimate_path_pdf", "gamma_direct",
    "generating_function", "green", "h_coeff", "invert_laplace", "laplace_wt",
    "lower_bound_a", "make_chain", "markov_generator_green", "parse_config",
    "path_pdf_explicit", "path_pdf_recursive", "path_weight_sum", "phi",
    "phi_by_recurrence", "phi_reduced", "reduce_lattice", "resolvent_green",
    "run_verification", "series_arrival", "simulate_walk", "stream_base",
    "survival_transform", "transfer_matrix_w", "uniform_at", "walk_ensemble",
]

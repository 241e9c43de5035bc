"""Spline wavelet bases, weighted Besov norms and discrete Hardy constants."""

__version__ = "0.1.0"

from .embednum import (
    DiagonalModel,
    NonHilbertError,
    approximation_numbers,
    embedding_diagonal,
    factorization_check,
    rank_k_bruteforce,
)
from .estimators import BesovNormEstimator, HardyConstantEstimator, WaveletCoefficientTransformer
from .hardy_ops import (
    OperatorSpec,
    SupportViolationError,
    hardy_bruteforce,
    hardy_C,
    hardy_M,
    hardy_N,
    rl_apply,
    verify_forward,
    verify_reverse,
)
from .spaces import (
    MollifierSpec,
    SequenceCoeffs,
    SpaceParams,
    analyze,
    b_norm,
    besov_norm_via_wavelets,
    f_norm,
    lp_besov_norm,
    required_order,
)
from .splinecore import PiecewisePoly, bspline, pp_antiderivative, pp_derivative, pp_eval, pp_inner
from .wavelet_construct import SeparableFunction, euler_frobenius, localized_basis, tensor_basis
from .weights import Weight1D, WeightN, muck_constant, parse_weight, r0_estimate

__all__ = [
    "BesovNormEstimator",
    "DiagonalModel",
    "HardyConstantEstimator",
    "MollifierSpec",
    "NonHilbertError",
    "OperatorSpec",
    "PiecewisePoly",
    "SeparableFunction",
    "SequenceCoeffs",
    "SpaceParams",
    "SupportViolationError",
    "WaveletCoefficientTransformer",
    "Weight1D",
    "WeightN",
    "analyze",
    "approximation_numbers",
    "b_norm",
    "besov_norm_via_wavelets",
    "bspline",
    "embedding_diagonal",
    "euler_frobenius",
    "f_norm",
    "factorization_check",
    "hardy_C",
    "hardy_M",
    "hardy_N",
    "hardy_bruteforce",
    "localized_basis",
    "lp_besov_norm",
    "muck_constant",
    "parse_weight",
    "pp_antiderivative",
    "pp_derivative",
    "pp_eval",
    "pp_inner",
    "r0_estimate",
    "rank_k_bruteforce",
    "required_order",
    "rl_apply",
    "tensor_basis",
    "verify_forward",
    "verify_reverse",
]

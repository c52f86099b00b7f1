"""Squeezed generalized rotating-wave approximation for the anisotropic Rabi model."""

from .exact import SpectrumResult, TruncatedBasis, converge_truncation, exact_gap_minimum, exact_observables
from .exceptions import (
    ConfigError,
    GsrwaError,
    NoCrossingError,
    NumericalError,
    SqueezingOverflowError,
    TruncationError,
)
from .solver import (
    Branch,
    GroundStateReport,
    Method,
    analytic_beta_lambda,
    cat_state,
    crossing_point,
    energy_first_excited,
    energy_ground,
    entanglement_entropy,
    mean_photon,
    minimize_functional,
    solve,
)
from .transform import ModelParams, VariationalParams, block_eigen, rwa_block

__all__ = [
    "Branch", "ConfigError", "GroundStateReport", "GsrwaError", "Method", "ModelParams",
    "NoCrossingError", "NumericalError", "SpectrumResult", "SqueezingOverflowError",
    "TruncatedBasis", "TruncationError", "VariationalParams", "analytic_beta_lambda",
    "block_eigen", "cat_state", "converge_truncation", "crossing_point",
    "energy_first_excited", "energy_ground", "entanglement_entropy", "exact_gap_minimum",
    "exact_observables", "mean_photon", "minimize_functional", "rwa_block", "solve",
]  # fmt: skip

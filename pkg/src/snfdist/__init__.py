"""Densities of Smith normal forms of random integer matrices and of multi-gcds of polynomial values."""

from .arith import ErrorBoundedReal, PrimePowerSet, bracket, c_limit, zeta
from .errors import BudgetExceeded, PrecisionFailure, SnfdistError
from .extremal import BVector, argmax_argmin, f_value, limit_m_infinity, monotonicity_report
from .gcd import (
    GcdSystem, GcdTargetSpec, MultivariatePolynomial, lambda_crt, lambda_global, lambda_ps, sigma_p,
)
from .global_density import mu_global_prefix, table_zl, y_function, z_l, z_l_residual, z_n, z_n_l
from .local import (
    LocalDistribution, SnfPrefixSpec, enumerate_distribution, mu_crt, mu_distribution,
    mu_prefix_local, mu_ps_point, mu_ps_prefix,
)
from .sampler import Estimate, SampleBox, sample_lambda, sample_mu, sigma_box
from .snf import IntegerMatrix, SnfDiagonal, minors_gcd_profile, snf_integer, snf_mod

__version__ = "0.1.0"

__all__ = [
    "BVector", "BudgetExceeded", "ErrorBoundedReal", "Estimate", "GcdSystem", "GcdTargetSpec",
    "IntegerMatrix", "LocalDistribution", "MultivariatePolynomial", "PrecisionFailure",
    "PrimePowerSet", "SampleBox", "SnfDiagonal", "SnfPrefixSpec", "SnfdistError",
    "argmax_argmin", "bracket", "c_limit", "enumerate_distribution", "f_value", "lambda_crt",
    "lambda_global", "lambda_ps", "limit_m_infinity", "minors_gcd_profile", "monotonicity_report",
    "mu_crt", "mu_distribution", "mu_global_prefix", "mu_prefix_local", "mu_ps_point",
    "mu_ps_prefix", "sample_lambda", "sample_mu", "sigma_box", "sigma_p", "snf_integer", "snf_mod",
    "table_zl", "y_function", "z_l", "z_l_residual", "z_n", "z_n_l", "zeta",
]

"""Order and type of entire functions, from coefficients, best approximations and growth."""

from .xlog import DomainError, LogReal, iter_ln, iter_ln_min_arg, log_sum_exp
from .functions import (
    CoeffModel, eval_log_M, model_exp, model_expexp, model_from_file,
    model_polynomial, model_sato_order, model_sato_type, parse_function_spec,
)
from .spaces import SpaceModel, monomial_norm, monomial_norm_oracle, mu_bounds, parse_space_spec
from .approx import en_bracket, en_table, exact_en_dirichlet
from .growth import (
    GrowthError, GrowthReport, corollary1_check, detect_q, limsup_estimate, rho_from_approx,
    rho_from_coeffs, rho_sigma_direct, sigma_from_approx, sigma_from_coeffs,
)

__version__ = "0.1.0"

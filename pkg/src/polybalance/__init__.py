"""Signed balancing of bounded polynomials with certified Chebyshev norms."""

from .cheb_core import ChebPoly, MonomialPoly, cheb_basis, eval_cheb, eval_trig, from_monomial, random_unit_poly, signed_sum
from .discrepancy import PCParams, SampleMatrix, SolverReport, discrepancy_of, solve
from .grids import Grid, extrema_grid, gauss_cheb_quadrature, l2_theta_norm_sq, roots_grid, sample_matrix
from .pipeline import (
    BalanceResult,
    balance_degree_d,
    balance_l2,
    balance_sup,
    random_instance,
    random_l2_instance,
    verify,
)
from .rudin_shapiro import flatness_report, lower_bound_check, rs_signs
from .sup_norm import SupCertificate, certified_sup, dense_sup_estimate, grid_max

__version__ = "0.1.0"

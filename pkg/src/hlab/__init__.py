"""Recovering Hadamard coefficients from Green's operators on flat model spacetimes."""

from . import precision  # noqa: F401  (fixes the mpmath working precision)
from .combinatorics import a_coeff, alpha_matrix, msexp_coeff, q_coeff, verify_left_inverse
from .curves import HyperbolicCurve, LiftedCurve, ReversedCurve, StraightLine, TimelikeCurve
from .fitting import AsymptoticFit, ExponentLadder, fit_ladder, fit_polynomial, xi_constant_term
from .greens import GreensFamily, offdiag_pair_greens, pair_greens_along_curve, product_pair_greens
from .mellin import MellinValue, mellin, mellin_over_gamma, mellin_prime
from .pipelines import (ExtractionReport, extract_diagonal_powers, extract_diagonal_product,
                        extract_diagonal_zfamily, extract_offdiagonal, intexp_forward, scalar_curvature_d4)
from .profiles import OddTestFunction, SmoothProfile, bump, even_part, odd_bump, odd_part
from .riesz import (CausalClassification, MinkowskiSpace, big_gamma, c_alpha, gamma_form,
                    paired_riesz_along_curve, riesz_eval)
from .special import gamma, generalized_binomial, reciprocal_gamma
from .transport import HadamardTable, SpacetimeModel, rho_apply, shift_coefficients, solve_transport

__version__ = "0.1.0"

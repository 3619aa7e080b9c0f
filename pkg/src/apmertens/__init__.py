"""Mertens constants for primes in arithmetic progressions and Chebotarev classes."""

from .ap_constants import (APConstants, G_constant, G_star, g_constant, g_star,
                           mertens_constant, prime_power_correction, script_L, sum_identity_residual)
from .characters import DirichletCharacter, characters_mod, conductor_and_primitive, decompose_units
from .chebotarev import (ChebotarevConstants, CubicS3, Cyclotomic, GaloisSetting, Quadratic,
                         frobenius_class, g_bruteforce_estimate, g_quadratic_exact, pi_chebotarev)
from .errors import (ApMertensError, BranchTrackingError, CacheCorruptError, ConsistencyError,
                     TableRangeError)
from .mertens import (MertensRow, abel_identity_residual, error_integral, mertens_row,
                      partial_sum_recip, product_report, tail_identity_report)
from .pliable import PliableQuery, main_term, phi_count, pliable_report
from .report import Report
from .sieve import APTarget, PrimeTable, build_table, error_term, li, omega_q, pi_ap
from .special_functions import digamma, euler_gamma, gamma_fn, l_one, log_l_one

__version__ = "0.1.0"

from .exponent import (BoundConfig, ConditionError, FractionPoint, FResult, NoRootError,
                       RootResult, alpha0, alphaR, best_c1, exhaustive_best_c1, condition_check, default_c1,
                       f_alpha, f_tilde, psi, psi_tilde, rho, rho_parts, typical_point)
from .multinomial import (entropy_h, log_lower_stirling, log_multinomial, log_upper_h,
                          log_upper_stirling, stirling_c0)
from .saddle import poly_F, poly_G, saddle_min
from .finite_length import FiniteLengthCurve, finite_length_bound, stratum_log_pe
from .gv import entropy_q, gv_distance
from .report import BoundReport, compute_report

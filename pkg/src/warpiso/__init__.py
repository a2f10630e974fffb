"""Numerical verification of weighted isoperimetric inequalities in warped products.

Star-shaped hypersurfaces are radial graphs ``r = R(theta)`` over the unit
sphere; weighted areas and volumes are computed by composite Gauss-Legendre
quadrature, projected to Euclidean space through ``(r, theta) -> lam(r) theta``
and compared against profile functions of centred balls.  Each comparison is
returned as a signed deficit.
"""

from .core import (ADS_SCHWARZSCHILD, EUCLIDEAN, HYPERBOLIC, Density, LogConvexityCertificate,
                   WarpedManifold, density_eval, lambda_big, logconvexity_check, psi_lambda,
                   rho_to_r, sphere_area, warp_eval)
from .errors import (ConfigError, DomainError, EvaluationError, InvalidDensityError,
                     InvalidGeneratorError, RangeError, WarpisoError)
from .profiles import KINDS as PROFILE_KINDS
from .profiles import ProfileFunction, invert_monotone, profile_eval, profile_function
from .quadrature import (DEFAULT_RULE, Box, McOracle, QuadratureRule, RadialRegion, integrate_1d,
                         integrate_nested, mc_estimate)
from .report import DeficitReport
from .surface import (CenteredBall, OffCenterBall, Perturbed, RadialProfile, Slice, make_profile,
                      mc_weighted_area, mc_weighted_volume, measures, support_function,
                      unweighted_volume, weighted_area, weighted_volume)
from .transfer import (EuclideanShadow, check_area_transfer, check_minkowski_normal,
                       check_volume_transfer, project, u_from_uhat_check)
from .verify import (CASES, SearchResult, chain, check_adss, check_euclidean, check_hyperbolic,
                     check_monte_carlo, check_warped, evaluate_case, minimize_deficit, sweep,
                     warped_hypotheses)

__version__ = "0.1.0"

__all__ = [
    "ADS_SCHWARZSCHILD", "EUCLIDEAN", "HYPERBOLIC", "CASES", "PROFILE_KINDS", "DEFAULT_RULE",
    "Density", "LogConvexityCertificate", "WarpedManifold", "density_eval", "lambda_big",
    "logconvexity_check", "psi_lambda", "rho_to_r", "sphere_area", "warp_eval",
    "ConfigError", "DomainError", "EvaluationError", "InvalidDensityError", "InvalidGeneratorError",
    "RangeError", "WarpisoError",
    "ProfileFunction", "invert_monotone", "profile_eval", "profile_function",
    "Box", "McOracle", "QuadratureRule", "RadialRegion", "integrate_1d", "integrate_nested",
    "mc_estimate", "DeficitReport",
    "CenteredBall", "OffCenterBall", "Perturbed", "RadialProfile", "Slice", "make_profile",
    "mc_weighted_area", "mc_weighted_volume", "measures", "support_function", "unweighted_volume",
    "weighted_area", "weighted_volume",
    "EuclideanShadow", "check_area_transfer", "check_minkowski_normal", "check_volume_transfer",
    "project", "u_from_uhat_check",
    "SearchResult", "chain", "check_adss", "check_euclidean", "check_hyperbolic",
    "check_monte_carlo", "check_warped", "evaluate_case", "minimize_deficit", "sweep",
    "warped_hypotheses",
]

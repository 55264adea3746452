"""Optimal recovery of functions with bounded second-order directional derivatives."""

from .errors import (BudgetError, DomainError, InvalidBody, InvalidCoefficients, IsorecError,
                     NTooSmall, OracleFailure, OutOfRange, ParameterError, PreconditionError,
                     UnsupportedDimension, UnsupportedOperator)
from .operators import (ComplexPair, DistinctReal, DoubleRoot, ExtremalProfile, G_eval,
                        OperatorSpec, as_operator, classify, delta_threshold, ext1, ext2,
                        extremal_profile, g_eval, g_prime_eval, h_tilde, h_tilde_prime, t_zero)
from .geometry import (Ball, Boundary, Box, DistanceEstimate, NodeSet, Polygon2D, body_from_dict,
                       one_sided_hausdorff)
from .covering import NodeGenReport, build_xi_star, dens_lookup, en_asymptotic
from .recovery import (ErrorReport, FoolingFunction, convergence_study, exact_error,
                       fooling_eval, fooling_grad, lower_bound_fooling, rn_asymptotic,
                       upper_bound, verify_fooling_class)

__version__ = "0.1.0"

__all__ = [
    "NodeGenReport",
    "build_xi_star",
    "dens_lookup",
    "en_asymptotic",
    "BudgetError",
    "DomainError",
    "InvalidBody",
    "InvalidCoefficients",
    "IsorecError",
    "NTooSmall",
    "OracleFailure",
    "OutOfRange",
    "ParameterError",
    "PreconditionError",
    "UnsupportedDimension",
    "UnsupportedOperator",
    "ComplexPair",
    "DistinctReal",
    "DoubleRoot",
    "ExtremalProfile",
    "G_eval",
    "OperatorSpec",
    "as_operator",
    "classify",
    "delta_threshold",
    "ext1",
    "ext2",
    "extremal_profile",
    "g_eval",
    "g_prime_eval",
    "h_tilde",
    "h_tilde_prime",
    "t_zero",
    "Ball",
    "Boundary",
    "Box",
    "DistanceEstimate",
    "NodeSet",
    "Polygon2D",
    "body_from_dict",
    "one_sided_hausdorff",
    "ErrorReport",
    "FoolingFunction",
    "convergence_study",
    "exact_error",
    "fooling_eval",
    "fooling_grad",
    "lower_bound_fooling",
    "rn_asymptotic",
    "upper_bound",
    "verify_fooling_class",
]

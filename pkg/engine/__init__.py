from .errors import (
    CoincidentRoots,
    ConfigError,
    EngineError,
    ExpressionSyntaxError,
    ExpressionTypeError,
    GenericityViolation,
    InvalidCombination,
    PoleOnContour,
    UnsupportedPoleGeometry,
)
from .ring import LaurentPoly, Monomial
from .kclass import KClass
from .series import BiLaurentSeries, FormalDelta, PSeries, Region
from .theta import ThetaRatio, theta_of_class
from .kernels import RationalFunction, gamma_coefficients, zeta_kernel
from .presentations import explicit_relations, relation_series
from .universal import ParamSpec, RepState, degenerate_to_k_theory, verify_elliptic_relation
from .pushforward import contour_push, lemma_integral_check, proj_bundle_push

__all__ = [
    'BiLaurentSeries', 'CoincidentRoots', 'ConfigError', 'EngineError', 'ExpressionSyntaxError',
    'ExpressionTypeError', 'FormalDelta', 'GenericityViolation', 'InvalidCombination', 'KClass',
    'LaurentPoly', 'Monomial', 'PSeries', 'ParamSpec', 'PoleOnContour', 'RationalFunction', 'Region',
    'RepState', 'ThetaRatio', 'UnsupportedPoleGeometry', 'contour_push', 'degenerate_to_k_theory',
    'explicit_relations', 'gamma_coefficients', 'lemma_integral_check', 'proj_bundle_push',
    'relation_series', 'theta_of_class', 'verify_elliptic_relation', 'zeta_kernel',
]

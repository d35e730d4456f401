"""Factorization of rational motions over the dual quaternions and linkage synthesis."""
from .algebra import (
    EPS,
    ONE,
    DualQuaternion,
    GeneratorKind,
    Line,
    Quaternion,
    act_on_point,
    axis_of,
    classify_generator,
    get_tol,
    rotation_generator,
    set_tol,
    tolerance,
)
from .bennett import (
    DiagnosisKind,
    SynthesisDiagnosis,
    bennett_flip,
    build_replacement_linkage,
    interpolate_poses,
    line_symmetric_motion,
    synthesize_bennett,
)
from .errors import MotionFactorError
from .factor import all_factorizations, factor_with_order, verify_factorization
from .linkage import Linkage, dh_from_axes, loop_residual, trajectory
from .mpoly import Factorization, MotionPolynomial, mp_div, mp_eval, mp_mul, mp_new, mp_norm
from .rpoly import QuadraticFactor, RealPoly, quadratic_factorization, repeated_quadratic
from .special import (
    TranslationMotionSpec,
    brace_chain,
    circular_translation_factors,
    elliptic_translation,
    multiplication_trick_planar,
    multiplication_trick_spatial,
    right_multiply,
)

__version__ = "0.1.0"

__all__ = [
    "DiagnosisKind",
    "DualQuaternion",
    "EPS",
    "Factorization",
    "GeneratorKind",
    "Line",
    "Linkage",
    "MotionFactorError",
    "MotionPolynomial",
    "ONE",
    "QuadraticFactor",
    "Quaternion",
    "RealPoly",
    "SynthesisDiagnosis",
    "TranslationMotionSpec",
    "act_on_point",
    "all_factorizations",
    "axis_of",
    "bennett_flip",
    "brace_chain",
    "build_replacement_linkage",
    "circular_translation_factors",
    "classify_generator",
    "dh_from_axes",
    "elliptic_translation",
    "factor_with_order",
    "get_tol",
    "interpolate_poses",
    "line_symmetric_motion",
    "loop_residual",
    "mp_div",
    "mp_eval",
    "mp_mul",
    "mp_new",
    "mp_norm",
    "multiplication_trick_planar",
    "multiplication_trick_spatial",
    "quadratic_factorization",
    "repeated_quadratic",
    "right_multiply",
    "rotation_generator",
    "set_tol",
    "synthesize_bennett",
    "tolerance",
    "trajectory",
    "verify_factorization",
]

"""Slice regular power series on the quaternion unit ball.

Quaternion arithmetic, the regular product and its relatives, the radius
formulas for injectivity and covering, and sampling checks that test them
on concrete functions.
"""
from .bounds import (
    LindelofBounds,
    MaximizationResult,
    RadiusPair,
    apollonius_ball,
    bergman_constants,
    bloch_constants,
    bonk_bound,
    extremal_cover,
    extremal_f_alpha,
    growth_bound_bergman,
    growth_bound_bloch,
    landau_covering,
    landau_radii,
    landau_radius,
    lindelof_bounds,
    maximize,
    rotation_covering_constants,
)
from .quaternion import (
    Ball,
    DomainError,
    I,
    ImaginaryUnit,
    J,
    K,
    ONE,
    Quaternion,
    compose,
    decompose,
    exp_slice,
    same_sphere,
)
from .sampling import SampleConfig
from .series import (
    SliceHolomorphic,
    SliceSeries,
    constant,
    escalate,
    evaluate,
    evaluate_many,
    identity,
    mobius,
    pointwise_star,
    polynomial,
    regular_conjugate,
    regular_reciprocal,
    represent,
    rotation,
    slice_derivative,
    split,
    star_product,
    symmetrization,
    transform_T,
)
from .verify import (
    HypothesisNotMet,
    VerificationReport,
    bergman_norm,
    bloch_seminorm,
    check_algebra,
    check_bonk,
    check_covering,
    check_growth,
    check_injective,
    check_lindelof,
    check_rotation_covering,
    landau_sharpness,
)

__version__ = "0.1.0"

"""Exact arithmetic for circle rotations and their +/-1 skew products.

The package computes, with no floating point on any decision path:

- quadratic-surd arithmetic on (a + b*sqrt(d))/c and circle points (`exact`),
- continued-fraction convergents, the denominator set and best-approximation
  facts (`cf`),
- Birkhoff sums of the +/-1 step function and the paired walk (`cocycle`),
- the cyclic partition of the circle into intervals of constancy of the paired
  walk, with exact lengths and measures (`partition`),
- the scaled orbit-proximity minima, a persistent-value detector and the
  closure of detected pairs into a canonical subgroup of Z^2 (`essential`),
- an argparse CLI (`cli`, entry point `skewrot`).
"""

from .cf import (
    ConvergentTable,
    denominator_set,
    expand,
    expand_to_cover,
    half_point_separation,
    is_badly_approximable,
    next_denominator,
    verify_best_approx,
)
from .cocycle import (
    CocycleContext,
    PairValue,
    birkhoff_sum,
    check_cocycle_identity,
    check_shift_bound,
    count_first_half,
    denjoy_koksma_check,
    displacement_pair,
    step,
)
from .errors import (
    BestApproxViolationError,
    EndOfTableError,
    IncomparableRepresentationsError,
    PreconditionUnmetError,
    RationalExhaustedError,
    SelfCheckError,
    SeparationBoundViolationError,
    SkewrotError,
    SumBoundViolationError,
    VerificationError,
    WrapInconsistentError,
)
from .essential import (
    CandidateValue,
    EpsilonTheta,
    SubgroupZ2,
    classify,
    close_subgroup,
    decay_diagnosis,
    detect,
    epsilon_theta,
    epsilon_theta_table,
    limsup_criterion,
)
from .exact import CirclePoint, ExactReal, compare, distance_to_integers, nearest_integer, parse_real, reduce_mod_1
from .partition import (
    ConstancyPartition,
    Discontinuity,
    build,
    discontinuities,
    right_neighbor_classes,
    uniform_distribution_check,
    value_histogram,
)

__version__ = "0.1.0"

__all__ = [
    "CirclePoint",
    "CocycleContext",
    "CandidateValue",
    "ConstancyPartition",
    "ConvergentTable",
    "Discontinuity",
    "EpsilonTheta",
    "ExactReal",
    "PairValue",
    "SubgroupZ2",
    "birkhoff_sum",
    "build",
    "check_cocycle_identity",
    "check_shift_bound",
    "classify",
    "close_subgroup",
    "compare",
    "count_first_half",
    "decay_diagnosis",
    "denjoy_koksma_check",
    "denominator_set",
    "detect",
    "discontinuities",
    "displacement_pair",
    "distance_to_integers",
    "epsilon_theta",
    "epsilon_theta_table",
    "expand",
    "expand_to_cover",
    "half_point_separation",
    "is_badly_approximable",
    "limsup_criterion",
    "nearest_integer",
    "next_denominator",
    "parse_real",
    "reduce_mod_1",
    "right_neighbor_classes",
    "step",
    "uniform_distribution_check",
    "value_histogram",
    "verify_best_approx",
    # errors
    "SkewrotError",
    "IncomparableRepresentationsError",
    "RationalExhaustedError",
    "EndOfTableError",
    "PreconditionUnmetError",
    "SelfCheckError",
    "BestApproxViolationError",
    "SeparationBoundViolationError",
    "SumBoundViolationError",
    "WrapInconsistentError",
    "VerificationError",
]

"""Moment-constrained positive quadratures and extreme symmetric measures
on [-1, 1]."""

from . import decompose, kfamily, legendre, measure, quadrature, represent
from .decompose import Decomposition, find_a1, find_b1, g_fn, h_fn
from .errors import DegenerateWeightError, MembershipError, NumericFailure
from .kfamily import KPoint
from .measure import Atom, IntervalUnion, Measure, Segment, uniform
from .quadrature import (
    ConvexTestFunction,
    ExtremalityReport,
    MomentVector,
    Quadrature,
    canonicalize,
    convex_catalog,
    convex_combination,
    gauss,
    is_exact,
    is_extreme,
    lobatto,
    moment_vector,
    radau,
    verify_extremality,
)
from .represent import (
    MixingMeasure,
    RepresentationResult,
    TestBasis,
    mixture_moment,
    solve_nnls,
    verify_representation,
)

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "ConvexTestFunction",
    "Decomposition",
    "DegenerateWeightError",
    "ExtremalityReport",
    "IntervalUnion",
    "KPoint",
    "Measure",
    "MembershipError",
    "MixingMeasure",
    "MomentVector",
    "NumericFailure",
    "Quadrature",
    "RepresentationResult",
    "Segment",
    "TestBasis",
    "canonicalize",
    "convex_catalog",
    "convex_combination",
    "decompose",
    "find_a1",
    "find_b1",
    "g_fn",
    "gauss",
    "h_fn",
    "is_exact",
    "is_extreme",
    "kfamily",
    "legendre",
    "lobatto",
    "measure",
    "mixture_moment",
    "moment_vector",
    "quadrature",
    "radau",
    "represent",
    "solve_nnls",
    "uniform",
    "verify_extremality",
    "verify_representation",
]

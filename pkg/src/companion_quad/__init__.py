"""Quarter-point companion quadrature with certified error bounds."""

from .bounds import (
    BoundReport,
    HolderPair,
    bound_for,
    companion_gap,
    companion_value,
    lipschitz_bound,
    m_exact,
    mean_value,
)
from .errors import (
    ArityError,
    CompanionQuadError,
    DensityError,
    DerivativeUnavailableError,
    DomainError,
    InvalidParameterError,
    NonDifferentiableError,
    NormError,
    ParseError,
    UnknownIdentifierError,
)
from .expr import Expression, IntegrandFunction, differentiate, evaluate, parse, render
from .extremal import (
    WitnessFunction,
    make_fstar,
    make_midpoint_kink,
    make_quarter_kink,
    verify_identity,
)
from .interval import Interval
from .norms import NormKind, SegmentNorms, estimate_norm, segment_norms
from .prob import CdfBoundReport, DensityFunction, cdf, cdf_companion_bound, expectation
from .quadrature import (
    Partition,
    QuadratureResult,
    adaptive_integrate,
    composite_rule,
    remainder_bound,
    uniform_partition,
)

__version__ = "0.1.0"

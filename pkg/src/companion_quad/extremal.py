"""Extremal functions for which the companion error bounds are attained.

Each witness is an :class:`IntegrandFunction` with closed-form values for
its companion functional, its integral mean and the norms of its
derivative, so sharpness can be checked against exact numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._integrate import adaptive_simpson
from .bounds import companion_value, mean_value
from .errors import DerivativeUnavailableError, InvalidParameterError
from .expr import IntegrandFunction
from .interval import Interval
from .norms import NormKind, SegmentNorms, _derivative_of, combine_parts


@dataclass(frozen=True)
class WitnessFunction:
    """A built-in piecewise function with exact metadata.

    ``slope`` is the constant value of ``|f'|`` away from the kinks, or
    None when the derivative is unbounded (Hölder witnesses with ``k < 1``).
    """

    name: str
    function: IntegrandFunction
    domain: Interval
    x: float
    companion: float
    mean: float
    slope: float | None

    @property
    def gap(self) -> float:
        """Exact ``|companion - mean|`` at the designated ``x``."""
        return abs(self.companion - self.mean)

    def companion_at(self, x: float) -> float:
        # every witness is symmetric about (a+b)/2, so the companion value is f(x)
        x = self.domain.check_left_half(x)
        return float(self.function(x))

    def norm(self, kind: NormKind, segment: tuple[float, float]) -> float:
        """Closed-form norm of f' on ``segment``."""
        if self.slope is None:
            raise DerivativeUnavailableError(
                f"{self.name}: derivative is unbounded, only the Hölder-class bound applies"
            )
        c, d = segment
        length = d - c
        if length <= 0.0:
            return 0.0
        if kind.name == "LInf":
            return self.slope
        return self.slope * length ** (1.0 / kind.exponent)

    def segment_norms(self, kind: NormKind, x: float | None = None) -> SegmentNorms:
        """Closed-form three-segment norms (the midpoint is always a kink)."""
        x = self.x if x is None else self.domain.check_left_half(x)
        a, b = self.domain.a, self.domain.b
        y = self.domain.reflect(x)
        parts = (self.norm(kind, (a, x)), self.norm(kind, (x, y)), self.norm(kind, (y, b)))
        return SegmentNorms(x, kind, *parts, combine_parts(kind, parts), True)


def make_fstar(x: float, k: float, domain: Interval) -> WitnessFunction:
    """The extremal Hölder function for the bound of order ``k`` at ``x``.

    ``(x-t)^k`` on ``[a, x]``, ``(t-x)^k`` on ``[x, (a+b)/2]``, mirrored about
    the midpoint on the right half.  Its companion value at ``x`` is 0 and
    its mean equals the Hölder-class bound with constant 1.
    """
    x = domain.check_left_half(x)
    k = float(k)
    if not (0.0 < k <= 1.0):
        raise InvalidParameterError(f"k must lie in (0, 1], got {k!r}")
    a, b, mid = domain.a, domain.b, domain.midpoint
    y = domain.reflect(x)

    # distances are taken to x or to its stored reflection y, never through
    # a + b - t, so that f*(y) is exactly 0
    def offset(t):
        t = np.asarray(t, dtype=float)
        return np.where(t > mid, t - y, t - x)

    def func(t):
        return np.abs(offset(t)) ** k

    def deriv(t):
        return np.sign(offset(t))

    kinks = sorted({p for p in (x, mid, y) if a <= p <= b})
    function = IntegrandFunction(
        func=func,
        dfunc=deriv if k == 1.0 else None,
        kink_points=tuple(kinks),
        certified=k == 1.0,
    )
    mean = 2.0 * ((x - a) ** (k + 1) + (mid - x) ** (k + 1)) / ((k + 1) * (b - a))
    return WitnessFunction(
        name=f"fstar(k={k:g})",
        function=function,
        domain=domain,
        x=x,
        companion=0.0,
        mean=mean,
        slope=1.0 if k == 1.0 else None,
    )


def make_midpoint_kink(k: float, domain: Interval) -> WitnessFunction:
    """``f(t) = k |t - (a+b)/2|``, extremal for the trapezoid (``x = a``) bounds."""
    k = float(k)
    if not k > 0.0:
        raise InvalidParameterError(f"k must be positive, got {k!r}")
    a, b, mid = domain.a, domain.b, domain.midpoint
    function = IntegrandFunction(
        func=lambda t: k * np.abs(np.asarray(t, dtype=float) - mid),
        dfunc=lambda t: k * np.sign(np.asarray(t, dtype=float) - mid),
        kink_points=(mid,),
        certified=True,
    )
    return WitnessFunction(
        name="midpoint-kink",
        function=function,
        domain=domain,
        x=a,
        companion=k * (b - a) / 2.0,
        mean=k * (b - a) / 4.0,
        slope=k,
    )


def make_quarter_kink(domain: Interval) -> WitnessFunction:
    """Distance to the nearer quarter point: extremal for the quarter-point rule.

    ``|t - (3a+b)/4|`` on ``[a, (a+b)/2]`` and ``|t - (a+3b)/4|`` beyond.
    """
    a, b, mid = domain.a, domain.b, domain.midpoint
    q1, q3 = domain.quarter_point, domain.reflect(domain.quarter_point)

    def func(t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= mid, np.abs(t - q1), np.abs(t - q3))

    def deriv(t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= mid, np.sign(t - q1), np.sign(t - q3))

    function = IntegrandFunction(
        func=func, dfunc=deriv, kink_points=(q1, mid, q3), certified=True
    )
    return WitnessFunction(
        name="quarter-kink",
        function=function,
        domain=domain,
        x=q1,
        companion=0.0,
        mean=(b - a) / 8.0,
        slope=1.0,
    )


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    gap: float


def verify_identity(f: IntegrandFunction, x: float, domain: Interval) -> IdentityCheck:
    """Check the integration-by-parts representation of the companion error.

    ``lhs`` is the companion functional minus the integral mean, ``rhs`` is
    ``(1/(b-a)) [∫_a^x (t-a) f' + ∫_x^{a+b-x} (t-(a+b)/2) f' + ∫_{a+b-x}^b (t-b) f']``.
    """
    x = domain.check_left_half(x)
    a, b, mid = domain.a, domain.b, domain.midpoint
    y = domain.reflect(x)
    g = _derivative_of(f)
    kinks = (*f.kink_points, mid)
    lhs = companion_value(f, x, domain) - mean_value(f, domain)
    terms = (
        adaptive_simpson(lambda t, s: (t - a) * g(t, s), a, x, kinks, sided=True),
        adaptive_simpson(lambda t, s: (t - mid) * g(t, s), x, y, kinks, sided=True),
        adaptive_simpson(lambda t, s: (t - b) * g(t, s), y, b, kinks, sided=True),
    )
    rhs = math.fsum(terms) / domain.length
    return IdentityCheck(lhs, rhs, abs(lhs - rhs))

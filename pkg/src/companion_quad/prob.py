"""Bounds relating the symmetrised CDF functional to the expectation.

For a random variable X on ``[a, b]`` with density f and CDF F, the gap

    | ½[F(x) + F(a+b-x)] - (b - E(X)) / (b - a) |

is bounded by the companion-rule majorants applied to F, whose derivative
is the density itself.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import numpy as np

from ._integrate import adaptive_simpson
from .bounds import integral
from .errors import DensityError, InvalidParameterError
from .expr import IntegrandFunction
from .interval import Interval
from .norms import NormKind, function_norm

log = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-8
NEGATIVITY_TOL = 1e-12
EXPECTATION_WARN = 1e-7
EXPECTATION_FAIL = 1e-6


@dataclass(frozen=True)
class DensityFunction:
    """A probability density on ``domain``; build it with :meth:`from_pdf`."""

    pdf: IntegrandFunction
    domain: Interval
    normalization: float

    @classmethod
    def from_pdf(
        cls,
        pdf: IntegrandFunction | str,
        domain: Interval,
        rescale: bool = False,
        samples: int = 1001,
    ) -> DensityFunction:
        """Validate non-negativity and unit mass.

        A density whose integral is off by more than 1e-8 is rejected unless
        ``rescale`` is set, in which case it is divided by its integral.
        """
        if isinstance(pdf, str):
            pdf = IntegrandFunction.from_expression(pdf)
        ts = np.linspace(domain.a, domain.b, samples)
        values = np.asarray(pdf(ts), dtype=float)
        if values.min() < -NEGATIVITY_TOL:
            i = int(values.argmin())
            raise DensityError(f"density is negative at t = {ts[i]!r}: {values[i]!r}")
        mass = integral(pdf, domain)
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            if not rescale:
                raise DensityError(
                    f"density integrates to {mass!r}, not 1; pass rescale=True to normalise"
                )
            if not mass > 0.0:
                raise DensityError(f"density has non-positive mass {mass!r}")
            pdf = pdf.scaled(1.0 / mass)
            mass = integral(pdf, domain)
        return cls(pdf, domain, mass)

    @functools.cached_property
    def mean(self) -> float:
        """E(X), computed once; see :func:`expectation`."""
        return _expectation(self)


@dataclass(frozen=True)
class CdfBoundReport:
    x: float
    functional: float
    target: float
    gap: float
    bound: float
    kind: NormKind
    certified: bool


def _cdf_many(d: DensityFunction, ts: np.ndarray) -> np.ndarray:
    """F at every entry of ``ts`` by accumulating integrals between sorted points."""
    ts = np.asarray(ts, dtype=float)
    flat = ts.ravel()
    order = np.argsort(flat, kind="stable")
    kinks = d.pdf.kink_points
    out = np.empty_like(flat)
    acc = 0.0
    prev = d.domain.a
    for i in order.tolist():
        t = flat[i]
        if t > prev:
            acc += adaptive_simpson(d.pdf.func, prev, t, kinks)
            prev = t
        out[i] = acc
    return out.reshape(ts.shape)


def cdf(d: DensityFunction, x: float) -> float:
    """``F(x) = ∫_a^x f``."""
    x = float(x)
    if not d.domain.contains(x):
        raise InvalidParameterError(f"x = {x!r} lies outside [{d.domain.a}, {d.domain.b}]")
    return adaptive_simpson(d.pdf.func, d.domain.a, x, d.pdf.kink_points)


def cdf_function(d: DensityFunction) -> IntegrandFunction:
    """F as an integrand whose derivative is the density."""
    pdf = d.pdf
    return IntegrandFunction(
        func=lambda t: _cdf_many(d, t),
        dfunc=pdf.func,
        kink_points=pdf.kink_points,
        certified=pdf.certified,
    )


def expectation(d: DensityFunction) -> float:
    """``E(X) = b - ∫_a^b F``, cross-checked against ``∫ t f(t) dt``."""
    return d.mean


def _expectation(d: DensityFunction) -> float:
    a, b = d.domain.a, d.domain.b
    kinks = d.pdf.kink_points
    mean = b - adaptive_simpson(lambda t: _cdf_many(d, t), a, b, kinks)
    direct = adaptive_simpson(lambda t: t * d.pdf.func(t), a, b, kinks)
    disagreement = abs(mean - direct)
    if disagreement > EXPECTATION_FAIL:
        raise DensityError(
            f"expectation estimates disagree by {disagreement:.3g}; the density is too rough"
        )
    if disagreement > EXPECTATION_WARN:
        log.warning("expectation cross-check differs by %.3g", disagreement)
    return mean


def density_norm(d: DensityFunction, kind: NormKind) -> float:
    """Norm of the density itself over the whole interval."""
    pdf = d.pdf
    return function_norm(
        lambda t, side=0: np.asarray(pdf.value(t, side), dtype=float),
        kind,
        d.domain.a,
        d.domain.b,
        pdf.kink_points,
    )


def cdf_companion_bound(d: DensityFunction, x: float, kind: NormKind) -> CdfBoundReport:
    """Gap between the symmetrised CDF and ``(b - E(X))/(b - a)``, with its bound.

    L-infinity: ``[1/8 + 2((x - (3a+b)/4)/(b-a))^2] (b-a) ‖f‖_∞``;
    Lp: ``2^(1/q)/(q+1)^(1/q) [u^(q+1) + v^(q+1)]^(1/q) (b-a)^(1/q) ‖f‖_p``;
    L1: ``1/4 + |x - (3a+b)/4| / (b-a)`` (the density has unit mass).
    """
    domain = d.domain
    x = domain.check_left_half(x)
    a, b, length = domain.a, domain.b, domain.length
    functional = 0.5 * (cdf(d, x) + cdf(d, domain.reflect(x)))
    target = (b - d.mean) / length
    u = (x - a) / length
    v = (domain.midpoint - x) / length
    if kind.name == "LInf":
        bound = (0.125 + 2.0 * (u - 0.25) ** 2) * length * density_norm(d, kind)
    elif kind.name == "Lp":
        q = kind.q
        bound = (
            2 ** (1 / q) / (q + 1) ** (1 / q)
            * (u ** (q + 1) + v ** (q + 1)) ** (1 / q)
            * length ** (1 / q)
            * density_norm(d, kind)
        )
    else:
        bound = 0.25 + abs(u - 0.25)
    return CdfBoundReport(
        x=x,
        functional=functional,
        target=target,
        gap=abs(functional - target),
        bound=bound,
        kind=kind,
        certified=d.pdf.certified,
    )

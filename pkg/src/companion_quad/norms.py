"""L1, Lp and L-infinity norms of a derivative over subintervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from ._integrate import adaptive_simpson, breakpoints_in
from .errors import (
    DerivativeUnavailableError,
    DomainError,
    InvalidParameterError,
    NormError,
)
from .expr import IntegrandFunction
from .interval import Interval

Segment = Union[Interval, "tuple[float, float]"]

SUP_SAMPLES = 65
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# above this exponent |g|^p is integrated relative to sup|g| to avoid overflow
_RESCALE_P = 8.0


@dataclass(frozen=True)
class NormKind:
    """Which norm regime: ``L1``, ``Lp`` (with ``p > 1``) or ``LInf``."""

    name: str
    p: float | None = None

    def __post_init__(self):
        if self.name not in ("L1", "Lp", "LInf"):
            raise InvalidParameterError(f"unknown norm kind {self.name!r}")
        if self.name == "Lp":
            if self.p is None or not (float(self.p) > 1.0) or not math.isfinite(float(self.p)):
                raise InvalidParameterError(f"Lp norm needs finite p > 1, got {self.p!r}")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise InvalidParameterError(f"{self.name} takes no exponent")

    @classmethod
    def l1(cls) -> NormKind:
        return cls("L1")

    @classmethod
    def lp(cls, p: float) -> NormKind:
        return cls("Lp", p)

    @classmethod
    def linf(cls) -> NormKind:
        return cls("LInf")

    @classmethod
    def from_flag(cls, flag: str, p: float | None = None) -> NormKind:
        """Build from the command-line spelling ``inf``, ``l1`` or ``lp``."""
        flag = flag.lower()
        if flag == "inf":
            return cls.linf()
        if flag == "l1":
            return cls.l1()
        if flag == "lp":
            if p is None:
                raise InvalidParameterError("--norm lp requires --p")
            return cls.lp(p)
        raise InvalidParameterError(f"unknown norm {flag!r}; use inf, l1 or lp")

    @property
    def q(self) -> float:
        """Conjugate exponent ``p / (p - 1)`` (Lp only)."""
        if self.name != "Lp":
            raise InvalidParameterError(f"{self.name} has no conjugate exponent")
        return self.p / (self.p - 1.0)

    @property
    def exponent(self) -> float:
        return {"L1": 1.0, "LInf": math.inf}.get(self.name, self.p)

    def __str__(self):
        return f"Lp(p={self.p:g})" if self.name == "Lp" else self.name


@dataclass(frozen=True)
class SegmentNorms:
    """Norms of f' on ``[a, x]``, ``[x, a+b-x]``, ``[a+b-x, b]`` and ``[a, b]``.

    ``certified`` is inherited from the integrand: true only when its
    derivative is exact and every kink is known.
    """

    x: float
    kind: NormKind
    left: float
    middle: float
    right: float
    whole: float
    certified: bool

    @property
    def parts(self) -> tuple[float, float, float]:
        return (self.left, self.middle, self.right)


def _endpoints(segment: Segment) -> tuple[float, float]:
    if isinstance(segment, Interval):
        return segment.a, segment.b
    c, d = (float(v) for v in segment)
    if not (math.isfinite(c) and math.isfinite(d)) or d < c:
        raise InvalidParameterError(f"bad segment [{c}, {d}]")
    return c, d


def _golden_max(g: Callable[[float], float], lo: float, hi: float, width: float) -> float:
    tol = 1e-8 * width
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    best = max(g1, g2)
    while hi - lo > tol:
        if g1 >= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - _GOLDEN * (hi - lo)
            g1 = g(x1)
            best = max(best, g1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + _GOLDEN * (hi - lo)
            g2 = g(x2)
            best = max(best, g2)
        if x1 >= x2:
            break
    return best


def sup_abs(
    g: Callable[..., np.ndarray],
    c: float,
    d: float,
    breakpoints: Iterable[float] = (),
    samples: int = SUP_SAMPLES,
) -> float:
    """Supremum of ``|g|`` on ``[c, d]`` for ``g(t, side)``.

    Each kink-free piece is sampled uniformly (its ends as one-sided limits)
    and the largest local maxima are polished by golden-section search.
    """
    if d == c:
        return 0.0
    best = 0.0
    nodes = breakpoints_in(c, d, breakpoints)
    for u, v in zip(nodes[:-1], nodes[1:]):
        ts = np.linspace(u, v, samples)
        vals = np.empty(samples)
        vals[0] = abs(float(g(np.array(u), 1)))
        vals[-1] = abs(float(g(np.array(v), -1)))
        vals[1:-1] = np.abs(g(ts[1:-1], 0))
        if not np.isfinite(vals).all():
            raise NormError(f"derivative is not finite on [{u}, {v}]")
        best = max(best, float(vals.max()))
        padded = np.concatenate([[-np.inf], vals, [-np.inf]])
        peaks = np.nonzero((vals >= padded[:-2]) & (vals >= padded[2:]))[0]
        peaks = peaks[np.argsort(vals[peaks])[::-1][:3]]

        def scalar(s: float) -> float:
            return abs(float(g(np.array(s), 0)))

        for i in peaks:
            # a maximum at an end reached by a strictly monotone, convex-or-linear
            # run of samples is the end value itself
            if i == 0 and vals[0] > vals[1] and vals[1] - vals[2] <= vals[0] - vals[1]:
                continue
            if (
                i == samples - 1
                and vals[-1] > vals[-2]
                and vals[-2] - vals[-3] <= vals[-1] - vals[-2]
            ):
                continue
            lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, samples - 1)]
            best = max(best, _golden_max(scalar, lo, hi, v - u))
    return best


def power_integral(
    g: Callable[..., np.ndarray],
    p: float,
    c: float,
    d: float,
    breakpoints: Iterable[float] = (),
) -> float:
    """``∫_c^d |g|^p`` by adaptive Simpson, split at the breakpoints."""
    if p == 1.0:
        return adaptive_simpson(lambda t, s: np.abs(g(t, s)), c, d, breakpoints, sided=True)
    return adaptive_simpson(lambda t, s: np.abs(g(t, s)) ** p, c, d, breakpoints, sided=True)


def function_norm(
    g: Callable[..., np.ndarray],
    kind: NormKind,
    c: float,
    d: float,
    breakpoints: Iterable[float] = (),
) -> float:
    """Norm of ``g(t, side)`` on ``[c, d]`` in the given regime."""
    if d == c:
        return 0.0
    breakpoints = tuple(breakpoints)
    try:
        if kind.name == "LInf":
            return sup_abs(g, c, d, breakpoints)
        if kind.name == "L1":
            return power_integral(g, 1.0, c, d, breakpoints)
        p = kind.p
        if p < _RESCALE_P:
            return power_integral(g, p, c, d, breakpoints) ** (1.0 / p)
        top = sup_abs(g, c, d, breakpoints)
        if top == 0.0:
            return 0.0
        scaled = power_integral(lambda t, s: g(t, s) / top, p, c, d, breakpoints)
        return top * scaled ** (1.0 / p)
    except DomainError as exc:
        raise NormError(f"derivative not finite on [{c}, {d}]: {exc}") from exc


def _derivative_of(f: IntegrandFunction) -> Callable[..., np.ndarray]:
    if not f.has_derivative:
        raise DerivativeUnavailableError(
            "the integrand has no derivative; supply one (and its kink points)"
        )
    return lambda t, side=0: np.asarray(f.prime(t, side), dtype=float)


def estimate_norm(f: IntegrandFunction, kind: NormKind, segment: Segment) -> float:
    """Norm of ``f'`` on ``segment``; a degenerate segment gives 0.

    >>> from companion_quad.expr import IntegrandFunction
    >>> f = IntegrandFunction.from_expression("t^2")
    >>> round(estimate_norm(f, NormKind.lp(2), (0.0, 1.0)), 6)
    1.154701
    """
    c, d = _endpoints(segment)
    g = _derivative_of(f)
    return function_norm(g, kind, c, d, f.kink_points)


def combine_parts(kind: NormKind, parts: Iterable[float]) -> float:
    """Norm over a union of disjoint pieces from the norms of the pieces."""
    parts = [float(v) for v in parts]
    if kind.name == "LInf":
        return max(parts, default=0.0)
    if kind.name == "L1":
        return math.fsum(parts)
    top = max(parts, default=0.0)
    if top == 0.0:
        return 0.0
    p = kind.p
    return top * math.fsum((v / top) ** p for v in parts) ** (1.0 / p)


def _is_kink(f: IntegrandFunction, t: float, scale: float) -> bool:
    return any(abs(k - t) <= 1e-12 * scale for k in f.kink_points)


def segment_norms(
    f: IntegrandFunction, x: float, domain: Interval, kind: NormKind
) -> SegmentNorms:
    """The three-segment decomposition at ``x`` in ``[a, (a+b)/2]``.

    At ``x = (a+b)/2`` the middle segment collapses; its L-infinity value is
    taken as ``|f'((a+b)/2)|`` when the derivative is continuous there and 0
    when the midpoint is a kink.
    """
    x = domain.check_left_half(x)
    a, b = domain.a, domain.b
    y = domain.reflect(x)
    g = _derivative_of(f)
    kinks = f.kink_points
    left = function_norm(g, kind, a, x, kinks)
    right = function_norm(g, kind, y, b, kinks)
    if y > x:
        middle = function_norm(g, kind, x, y, kinks)
    elif kind.name == "LInf" and not _is_kink(f, x, max(abs(a), abs(b), 1.0)):
        try:
            middle = abs(float(g(np.array(x), 0)))
        except DomainError as exc:
            raise NormError(str(exc)) from exc
    else:
        middle = 0.0
    whole = combine_parts(kind, (left, middle, right))
    return SegmentNorms(x, kind, left, middle, right, whole, f.certified)

"""The two-point companion functional and its error majorants.

All bounds concern

    E(x) = ½[f(x) + f(a+b-x)] - (1/(b-a)) ∫_a^b f,    a <= x <= (a+b)/2,

in terms of norms of f' on the three segments ``[a, x]``, ``[x, a+b-x]``
and ``[a+b-x, b]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._integrate import adaptive_simpson
from .errors import InvalidParameterError
from .expr import IntegrandFunction
from .interval import Interval
from .norms import NormKind, SegmentNorms, _derivative_of


@dataclass(frozen=True)
class HolderPair:
    """Conjugate exponents ``alpha > 1``, ``1/alpha + 1/beta = 1``."""

    alpha: float
    beta: float

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        if not alpha > 1.0 or not beta > 1.0:
            raise InvalidParameterError(f"Hölder exponents must exceed 1, got ({alpha}, {beta})")
        if abs(1.0 / alpha + 1.0 / beta - 1.0) > 1e-15:
            raise InvalidParameterError(f"({alpha}, {beta}) are not conjugate exponents")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_alpha(cls, alpha: float) -> HolderPair:
        alpha = float(alpha)
        if not alpha > 1.0:
            raise InvalidParameterError(f"alpha must exceed 1, got {alpha}")
        beta = alpha / (alpha - 1.0)
        # round-off in beta can push 1/alpha + 1/beta a few ulps away from 1
        if abs(1.0 / alpha + 1.0 / beta - 1.0) > 1e-15:
            beta = 1.0 / (1.0 - 1.0 / alpha)
        return cls(alpha, beta)


@dataclass(frozen=True)
class BoundReport:
    """Every applicable majorant of ``|E(x)|`` for one norm regime.

    ``first_bound`` is the segment-norm bound; ``max_branch``,
    ``holder_branch`` and ``dual_max_branch`` are its three coarsenings.
    ``combined`` is the Lp-only bound that uses the whole-interval norm with
    Hölder exponents ``(q, p)``.
    """

    x: float
    kind: NormKind
    first_bound: float
    max_branch: float
    holder_branch: float | None
    holder: HolderPair | None
    dual_max_branch: float
    combined: float | None
    certified: bool

    def branches(self) -> dict[str, float]:
        out = {"max_branch": self.max_branch, "dual_max_branch": self.dual_max_branch}
        if self.holder_branch is not None:
            out["holder_branch"] = self.holder_branch
        if self.combined is not None:
            out["combined"] = self.combined
        return out

    @property
    def best(self) -> float:
        return min([self.first_bound, *self.branches().values()])


def companion_value(f: IntegrandFunction, x: float, domain: Interval) -> float:
    """``½[f(x) + f(a+b-x)]``."""
    x = domain.check_left_half(x)
    return 0.5 * (float(f(x)) + float(f(domain.reflect(x))))


def integral(f: IntegrandFunction, domain: Interval) -> float:
    """``∫_a^b f`` by adaptive Simpson split at the kinks of f."""
    return adaptive_simpson(f.func, domain.a, domain.b, f.kink_points)


def mean_value(f: IntegrandFunction, domain: Interval) -> float:
    return integral(f, domain) / domain.length


def companion_gap(f: IntegrandFunction, x: float, domain: Interval) -> float:
    """Signed ``E(x)``: companion functional minus the integral mean."""
    return companion_value(f, x, domain) - mean_value(f, domain)


def m_exact(f: IntegrandFunction, x: float, domain: Interval) -> float:
    """The weighted-|f'| majorant ``M(x)``.

    ``(1/(b-a)) [∫_a^x (t-a)|f'| + ∫_x^{a+b-x} |t-(a+b)/2| |f'| + ∫_{a+b-x}^b (b-t)|f'|]``
    """
    x = domain.check_left_half(x)
    a, b, mid = domain.a, domain.b, domain.midpoint
    y = domain.reflect(x)
    g = _derivative_of(f)
    kinks = (*f.kink_points, mid)
    parts = (
        adaptive_simpson(lambda t, s: (t - a) * np.abs(g(t, s)), a, x, kinks, sided=True),
        adaptive_simpson(lambda t, s: np.abs(t - mid) * np.abs(g(t, s)), x, y, kinks, sided=True),
        adaptive_simpson(lambda t, s: (b - t) * np.abs(g(t, s)), y, b, kinks, sided=True),
    )
    return math.fsum(parts) / domain.length


def _reduced(x: float, domain: Interval) -> tuple[float, float]:
    """``u = (x-a)/(b-a)`` and ``v = ((a+b)/2 - x)/(b-a)``; ``u + v = 1/2``."""
    length = domain.length
    return (x - domain.a) / length, (domain.midpoint - x) / length


def _linf_report(norms, u, v, length, holder):
    n_l, n_m, n_r = norms.parts
    first = length * (0.5 * u * u * (n_l + n_r) + v * v * n_m)
    w = u - 0.25  # (x - (3a+b)/4)/(b-a)
    max_branch = (0.125 + 2.0 * w * w) * length * norms.whole
    holder_branch = None
    if holder is not None:
        al, be = holder.alpha, holder.beta
        coeff = (u ** (2 * al) / 2 ** (al - 1) + v ** (2 * al)) ** (1 / al)
        holder_branch = coeff * _power_sum(norms.parts, be) * length
    dual = max(0.5 * u * u, v * v) * (n_l + n_m + n_r) * length
    return first, max_branch, holder_branch, dual, None


def _lp_report(norms, u, v, length, holder):
    q = norms.kind.q
    p = norms.kind.p
    n_l, n_m, n_r = norms.parts
    scale = length ** (1 / q) / (q + 1) ** (1 / q)
    cu = u ** (1 + 1 / q)
    cv = 2 ** (1 / q) * v ** (1 + 1 / q)
    first = scale * (cu * (n_l + n_r) + cv * n_m)
    max_branch = scale * (2 * cu + cv) * max(norms.parts)
    holder_branch = None
    if holder is not None:
        al, be = holder.alpha, holder.beta
        coeff = (2 * u ** (al + al / q) + 2 ** (al / q) * v ** (al + al / q)) ** (1 / al)
        holder_branch = scale * coeff * _power_sum(norms.parts, be)
    dual = scale * max(cu, cv) * (n_l + n_m + n_r)
    combined = (
        2 ** (1 / q) / (q + 1) ** (1 / q)
        * (u ** (q + 1) + v ** (q + 1)) ** (1 / q)
        * length ** (1 / q)
        * _power_sum(norms.parts, p)
    )
    return first, max_branch, holder_branch, dual, combined


def _l1_report(norms, u, v, length, holder):
    n_l, n_m, n_r = norms.parts
    first = u * (n_l + n_r) + v * n_m
    max_branch = (0.25 + abs(u - 0.25)) * norms.whole
    holder_branch = None
    if holder is not None:
        al, be = holder.alpha, holder.beta
        holder_branch = (2 * u**al + v**al) ** (1 / al) * _power_sum(norms.parts, be)
    dual = (u + 0.5) * max(norms.parts)
    return first, max_branch, holder_branch, dual, None


def _power_sum(values, r: float) -> float:
    """``(Σ v^r)^(1/r)`` evaluated without overflow."""
    top = max(values)
    if top == 0.0:
        return 0.0
    return top * math.fsum((v / top) ** r for v in values) ** (1 / r)


_DISPATCH = {"LInf": _linf_report, "Lp": _lp_report, "L1": _l1_report}


def bound_for(
    norms: SegmentNorms,
    x: float,
    domain: Interval,
    holder: HolderPair | None = None,
) -> BoundReport:
    """All majorants of ``|E(x)|`` from precomputed segment norms.

    The Hölder branch is reported only when ``holder`` is given.
    """
    x = domain.check_left_half(x)
    if abs(norms.x - x) > 1e-15 * max(1.0, abs(x)):
        raise InvalidParameterError(f"norms were computed at x = {norms.x!r}, not {x!r}")
    u, v = _reduced(x, domain)
    first, max_branch, holder_branch, dual, combined = _DISPATCH[norms.kind.name](
        norms, u, v, domain.length, holder
    )
    return BoundReport(
        x=x,
        kind=norms.kind,
        first_bound=first,
        max_branch=max_branch,
        holder_branch=holder_branch,
        holder=holder if holder_branch is not None else None,
        dual_max_branch=dual,
        combined=combined,
        certified=norms.certified,
    )


def lipschitz_bound(x: float, domain: Interval, k: float, M: float) -> float:
    """Bound on ``|E(x)|`` for ``f`` Hölder continuous of order ``k`` with constant ``M``.

    ``[2^(k+1) (x-a)^(k+1) + (a+b-2x)^(k+1)] / [2^k (k+1) (b-a)] * M``
    """
    x = domain.check_left_half(x)
    if not (0.0 < k <= 1.0):
        raise InvalidParameterError(f"k must lie in (0, 1], got {k!r}")
    if not (M >= 0.0) or not math.isfinite(M):
        raise InvalidParameterError(f"M must be finite and non-negative, got {M!r}")
    a, b = domain.a, domain.b
    num = 2 ** (k + 1) * (x - a) ** (k + 1) + (a + b - 2 * x) ** (k + 1)
    return num / (2**k * (k + 1) * (b - a)) * M

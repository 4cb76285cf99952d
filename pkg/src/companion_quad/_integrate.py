"""Locally adaptive Simpson integration, vectorised level by level."""
from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from .errors import NormError

RTOL = 1e-10
MAX_DEPTH = 52
MAX_PANELS = 1 << 20
_INITIAL_SPLIT = 4


def _check(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NormError("integrand produced a non-finite value")
    return values


def breakpoints_in(c: float, d: float, points: Iterable[float]) -> list[float]:
    """Sorted nodes ``c < p_1 < ... < d`` including the interior ``points``."""
    inner = sorted({float(p) for p in points if c < p < d})
    return [c, *inner, d]


def adaptive_simpson(
    func: Callable[[np.ndarray], np.ndarray],
    c: float,
    d: float,
    breakpoints: Iterable[float] = (),
    rtol: float = RTOL,
    atol: float = 1e-300,
    max_depth: int = MAX_DEPTH,
    sided: bool = False,
) -> float:
    """Integrate a vectorised ``func`` over ``[c, d]``.

    Each panel is halved until the two-panel Simpson sum differs from the
    one-panel sum by less than its share of ``rtol`` times the integral of
    ``|func|``; the accepted value carries the Richardson correction.
    Breakpoints become panel edges and are never straddled.

    With ``sided`` the integrand is called as ``func(t, side)`` on the
    initial panel edges so that jumps at breakpoints are sampled as the
    right limit on a panel's left edge and the left limit on its right edge.
    """
    if d == c:
        return 0.0
    if d < c:
        return -adaptive_simpson(func, d, c, breakpoints, rtol, atol, max_depth, sided)

    nodes = breakpoints_in(c, d, breakpoints)
    edges = []
    for u, v in zip(nodes[:-1], nodes[1:]):
        edges.extend(np.linspace(u, v, _INITIAL_SPLIT + 1)[:-1])
    edges.append(d)
    edges = np.asarray(edges)
    left, right = edges[:-1], edges[1:]
    mid = 0.5 * (left + right)

    if sided:
        fl = _check(np.asarray(func(left, 1), dtype=float))
        fr = _check(np.asarray(func(right, -1), dtype=float))
        inner = func
        func = lambda t: inner(t, 0)  # noqa: E731
    else:
        fl = _check(np.asarray(func(left), dtype=float))
        fr = _check(np.asarray(func(right), dtype=float))
    fm = _check(np.asarray(func(mid), dtype=float))
    h = right - left
    whole = h / 6.0 * (fl + 4.0 * fm + fr)
    scale = float(np.sum(h / 6.0 * (np.abs(fl) + 4.0 * np.abs(fm) + np.abs(fr))))
    length = d - c

    total = []
    accepted_abs = 0.0
    depth = 0
    while left.size:
        lm = 0.5 * (left + mid)
        rm = 0.5 * (mid + right)
        probe = _check(np.asarray(func(np.concatenate([lm, rm])), dtype=float))
        flm, frm = probe[: left.size], probe[left.size:]
        h = right - left
        s_left = h / 12.0 * (fl + 4.0 * flm + fm)
        s_right = h / 12.0 * (fm + 4.0 * frm + fr)
        diff = s_left + s_right - whole
        active = float(np.sum(np.abs(s_left) + np.abs(s_right)))
        scale = max(scale, accepted_abs + active)
        tol = max(atol, rtol * scale)
        done = np.abs(diff) <= 15.0 * tol * (h / length)
        if depth >= max_depth or left.size > MAX_PANELS:
            done[:] = True
        # midpoints that no longer separate from the ends cannot be refined
        done |= (mid <= left) | (mid >= right)
        if np.any(done):
            accepted = s_left[done] + s_right[done] + diff[done] / 15.0
            total.append(accepted)
            accepted_abs += float(np.sum(np.abs(accepted)))
        keep = ~done
        if not np.any(keep):
            break
        left, mid, right = left[keep], mid[keep], right[keep]
        fl, fm, fr = fl[keep], fm[keep], fr[keep]
        flm, frm = flm[keep], frm[keep]
        s_left, s_right = s_left[keep], s_right[keep]
        left, mid, right = (
            np.concatenate([left, mid]),
            np.concatenate([lm[keep], rm[keep]]),
            np.concatenate([mid, right]),
        )
        fl, fm, fr = (
            np.concatenate([fl, fm]),
            np.concatenate([flm, frm]),
            np.concatenate([fm, fr]),
        )
        whole = np.concatenate([s_left, s_right])
        depth += 1

    if not total:
        return 0.0
    return math.fsum(np.concatenate(total).tolist())

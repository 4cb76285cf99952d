"""Composite quarter-point quadrature with certified remainder bounds.

On each cell ``[x_i, x_{i+1}]`` of a partition the rule samples the two
quarter points,

    Q_n = ½ Σ [f((3x_i + x_{i+1})/4) + f((x_i + 3x_{i+1})/4)] h_i,

and the remainder ``∫f - Q_n`` is bounded through the norm of f' on each
cell (L-infinity, Lp or L1).
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError
from .expr import IntegrandFunction
from .interval import Interval
from .norms import NormKind, _derivative_of, combine_parts, estimate_norm

log = logging.getLogger(__name__)

DEFAULT_MAX_INTERVALS = 1_000_000


@dataclass(frozen=True)
class Partition:
    """Strictly increasing nodes ``a = x_0 < x_1 < ... < x_n = b``."""

    nodes: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(v) for v in self.nodes)
        if len(nodes) < 2:
            raise InvalidParameterError("a partition needs at least two nodes")
        if not all(math.isfinite(v) for v in nodes):
            raise InvalidParameterError("partition nodes must be finite")
        if any(u >= v for u, v in zip(nodes[:-1], nodes[1:])):
            raise InvalidParameterError("partition nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n(self) -> int:
        return len(self.nodes) - 1

    @property
    def domain(self) -> Interval:
        return Interval(self.nodes[0], self.nodes[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.nodes))

    @property
    def mesh(self) -> float:
        """Largest cell width."""
        return float(self.widths.max())

    def cells(self) -> list[tuple[float, float]]:
        return list(zip(self.nodes[:-1], self.nodes[1:]))


@dataclass(frozen=True)
class QuadratureResult:
    """Estimate ``Q_n`` with a majorant of ``|∫f - Q_n|``.

    ``per_interval`` holds ``(cell estimate, cell bound)`` pairs.
    ``per_interval_sum`` is the sum of the cell bounds; for
    :func:`remainder_bound` ``remainder_bound`` is the coarser aggregate
    built from the whole-interval norm, for :func:`adaptive_integrate` the
    two coincide.  ``converged`` is false only when the adaptive driver hit
    its interval cap before meeting the tolerance.
    """

    estimate: float
    remainder_bound: float
    kind: NormKind
    partition: Partition
    per_interval: list[tuple[float, float]] = field(repr=False)
    certified: bool
    per_interval_sum: float
    global_norm: float
    converged: bool = True

    @property
    def n(self) -> int:
        return self.partition.n


def uniform_partition(domain: Interval, n: int) -> Partition:
    """Equidistant nodes ``x_i = a + i (b-a)/n``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    a, length = domain.a, domain.length
    nodes = [a + i * length / n for i in range(n)] + [domain.b]
    return Partition(tuple(nodes))


def _cell_estimates(f: IntegrandFunction, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    h = right - left
    lo = (3.0 * left + right) / 4.0
    hi = (left + 3.0 * right) / 4.0
    values = np.asarray(f(np.concatenate([lo, hi])), dtype=float)
    m = left.size
    return 0.5 * (values[:m] + values[m:]) * h


def composite_rule(f: IntegrandFunction, partition: Partition) -> float:
    """The composite quarter-point rule ``Q_n`` on ``partition``."""
    nodes = np.asarray(partition.nodes)
    return math.fsum(_cell_estimates(f, nodes[:-1], nodes[1:]).tolist())


def _cell_constant(kind: NormKind, h: float) -> float:
    """Factor multiplying the cell norm in the per-cell bound."""
    if kind.name == "LInf":
        return h * h / 8.0
    if kind.name == "L1":
        return h / 4.0
    q = kind.q
    return h ** (1.0 + 1.0 / q) / (4.0 * (q + 1.0) ** (1.0 / q))


def cell_bound(f: IntegrandFunction, c: float, d: float, kind: NormKind) -> tuple[float, float]:
    """``(norm of f' on [c, d], bound on the cell's quadrature error)``."""
    norm = estimate_norm(f, kind, (c, d))
    return norm, _cell_constant(kind, d - c) * norm


def _aggregate(kind: NormKind, widths: np.ndarray, global_norm: float) -> float:
    if kind.name == "LInf":
        return global_norm * math.fsum((widths**2).tolist()) / 8.0
    if kind.name == "L1":
        return global_norm * float(widths.max()) / 4.0
    q = kind.q
    top = float(widths.max())
    sum_term = top ** (q + 1.0) * math.fsum(((widths / top) ** (q + 1.0)).tolist())
    return global_norm * sum_term ** (1.0 / q) / (4.0 * (q + 1.0) ** (1.0 / q))


def remainder_bound(
    f: IntegrandFunction, partition: Partition, kind: NormKind
) -> QuadratureResult:
    """Composite estimate plus per-cell and aggregate remainder bounds.

    The aggregate uses the norm of f' over the whole interval:
    ``‖f'‖_∞ Σh²/8``, ``‖f'‖_p (Σh^(q+1))^(1/q) / (4 (q+1)^(1/q))`` or
    ``‖f'‖_1 max h / 4``.  It is never smaller than the per-cell sum.
    """
    _derivative_of(f)
    nodes = np.asarray(partition.nodes)
    left, right = nodes[:-1], nodes[1:]
    estimates = _cell_estimates(f, left, right)
    norms = []
    bounds = []
    for c, d in zip(left.tolist(), right.tolist()):
        norm, bound = cell_bound(f, c, d, kind)
        norms.append(norm)
        bounds.append(bound)
    global_norm = combine_parts(kind, norms)
    if kind.name == "LInf":
        # sampling the whole interval can land on a larger value than any cell
        global_norm = max(global_norm, estimate_norm(f, kind, partition.domain))
    widths = partition.widths
    return QuadratureResult(
        estimate=math.fsum(estimates.tolist()),
        remainder_bound=_aggregate(kind, widths, global_norm),
        kind=kind,
        partition=partition,
        per_interval=list(zip(estimates.tolist(), bounds)),
        certified=f.certified,
        per_interval_sum=math.fsum(bounds),
        global_norm=global_norm,
    )


def adaptive_integrate(
    f: IntegrandFunction,
    domain: Interval,
    tol: float,
    kind: NormKind,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
) -> QuadratureResult:
    """Bisect the cell with the largest error bound until the bounds sum to ``tol``.

    The starting partition has a node at every kink of f inside the domain.
    When ``max_intervals`` is reached first the best result so far is
    returned with ``converged=False``.
    """
    if not (tol > 0.0) or not math.isfinite(tol):
        raise InvalidParameterError(f"tol must be positive and finite, got {tol!r}")
    if max_intervals < 1:
        raise InvalidParameterError("max_intervals must be at least 1")
    _derivative_of(f)

    start = [domain.a, *sorted(k for k in set(f.kink_points) if domain.a < k < domain.b), domain.b]
    # heap entries: (-bound, left, right, estimate, bound, norm)
    heap = []
    total = 0.0
    for c, d in zip(start[:-1], start[1:]):
        est = float(_cell_estimates(f, np.array([c]), np.array([d]))[0])
        norm, bound = cell_bound(f, c, d, kind)
        heapq.heappush(heap, (-bound, c, d, est, bound, norm))
        total += bound

    converged = True
    while total > tol:
        if len(heap) >= max_intervals:
            converged = False
            break
        _, c, d, _, bound, _ = heap[0]
        m = 0.5 * (c + d)
        if not (c < m < d):
            log.warning("cell [%r, %r] cannot be bisected further", c, d)
            converged = False
            break
        heapq.heappop(heap)
        total -= bound
        ests = _cell_estimates(f, np.array([c, m]), np.array([m, d]))
        for (lo, hi), est in zip(((c, m), (m, d)), ests.tolist()):
            norm, b = cell_bound(f, lo, hi, kind)
            heapq.heappush(heap, (-b, lo, hi, est, b, norm))
            total += b
        if total <= tol:
            # guard against drift in the running sum
            total = math.fsum(entry[4] for entry in heap)

    cells = sorted(heap, key=lambda entry: entry[1])
    nodes = [cells[0][1]] + [entry[2] for entry in cells]
    partition = Partition(tuple(nodes))
    bound_sum = math.fsum(entry[4] for entry in cells)
    if converged and bound_sum > tol:
        converged = False
    return QuadratureResult(
        estimate=math.fsum(entry[3] for entry in cells),
        remainder_bound=bound_sum,
        kind=kind,
        partition=partition,
        per_interval=[(entry[3], entry[4]) for entry in cells],
        certified=f.certified,
        per_interval_sum=bound_sum,
        global_norm=combine_parts(kind, [entry[5] for entry in cells]),
        converged=converged,
    )

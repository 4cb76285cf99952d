from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[a, b]`` with ``a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidParameterError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise InvalidParameterError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def quarter_point(self) -> float:
        """``(3a + b) / 4``, the left node of the two-point quarter rule."""
        return 0.25 * (3.0 * self.a + self.b)

    def reflect(self, x: float) -> float:
        """Mirror image ``a + b - x`` of ``x``."""
        return self.a + self.b - x

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def check_left_half(self, x: float) -> float:
        """Validate ``a <= x <= (a + b)/2`` and return ``x`` as a float."""
        x = float(x)
        if not (self.a <= x <= self.midpoint):
            raise InvalidParameterError(
                f"x = {x!r} must lie in [a, (a+b)/2] = [{self.a!r}, {self.midpoint!r}]"
            )
        return x

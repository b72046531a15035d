"""Sweeps over the list size ``ℓ``."""

from dataclasses import dataclass
from enum import Enum
from math import log
from typing import Optional, Tuple

from qibo.config import raise_error

from palettelab.errors import ParameterError


class SweepType(Enum):
    """How grid values turn into list sizes."""

    ABSOLUTE = "absolute"
    """Values are list sizes."""
    FACTOR = "factor"
    """Values multiply ``log n``."""


def ell_from_factor(c: float, n: int, D: int) -> int:
    """``round(c log n)`` clamped to ``[1, D+1]``."""
    raw = round(c * log(n)) if n > 1 else 1
    return min(max(raw, 1), D + 1)


@dataclass(frozen=True)
class Sweeper:
    """Strictly increasing grid of list-size values.

    Args:
        values: grid, strictly increasing.
        type: whether values are list sizes or factors of ``log n``.
    """

    values: Tuple[float, ...]
    type: SweepType = SweepType.FACTOR

    def __post_init__(self):
        if not self.values:
            raise_error(ParameterError, "Cannot sweep an empty grid.")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise_error(ParameterError, f"Grid {self.values} is not strictly increasing.")
        if any(v <= 0 for v in self.values):
            raise_error(ParameterError, "Grid values must be positive.")
        if self.type is SweepType.ABSOLUTE and any(
            int(v) != v for v in self.values
        ):
            raise_error(ParameterError, "Absolute list sizes must be integers.")

    def __len__(self) -> int:
        return len(self.values)

    def factor(self, value: float) -> Optional[float]:
        """The ``c`` recorded for ``value``, ``None`` for absolute sizes."""
        return value if self.type is SweepType.FACTOR else None

    def ell(self, value: float, n: int, D: int) -> int:
        if self.type is SweepType.FACTOR:
            return ell_from_factor(value, n, D)
        return int(value)

"""Observation-model configuration and count vectors.

The sampling model throughout the package: d independent coordinates with
rates lambda_i > 0, an observed vector x with x_i ~ Po(r * lambda_i), and a
future vector y with y_i ~ Po(s * lambda_i). r and s are known positive
exposure factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Tuple

__all__ = ["ModelConfig", "Counts"]


@dataclass(frozen=True)
class ModelConfig:
    """Dimension d and exposure factors (r for observed, s for future)."""

    d: int
    r: float
    s: float

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError("d must be a positive integer")
        for name in ("r", "s"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and positive")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "s", float(self.s))


@dataclass(frozen=True)
class Counts:
    """An immutable vector of non-negative integer counts with a cached sum."""

    values: Tuple[int, ...]
    total: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) == 0:
            raise ValueError("counts vector must be non-empty")
        for v in vals:
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError("counts must be non-negative integers")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "total", sum(vals))

    @classmethod
    def of(cls, values: Iterable[int]) -> "Counts":
        return cls(tuple(int(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)


def check_dimension(c: Counts, cfg: ModelConfig, name: str) -> None:
    if len(c) != cfg.d:
        raise ValueError(f"{name} has length {len(c)}, model dimension is {cfg.d}")

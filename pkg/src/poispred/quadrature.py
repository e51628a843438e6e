"""Adaptive Simpson quadrature with an explicit error estimate.

Small and self-contained on purpose: the risk integrals in this package are
1-D with smooth integrands on finite intervals, and the callers need the
achieved-error estimate alongside the value so they can fold it into their
own certified bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

from .errors import QuadratureError

__all__ = ["QuadraturePolicy", "adaptive_simpson"]


@dataclass(frozen=True)
class QuadraturePolicy:
    abs_tol: float = 1e-9
    max_subdivisions: int = 100_000
    scheme: str = "adaptive-simpson"

    def __post_init__(self):
        if not (0.0 < self.abs_tol < 1.0):
            raise ValueError("abs_tol must lie in (0, 1)")
        if self.max_subdivisions < 8:
            raise ValueError("max_subdivisions too small")
        if self.scheme != "adaptive-simpson":
            raise ValueError(f"unknown quadrature scheme: {self.scheme!r}")


def _eval(fn: Callable[[float], float], x: float) -> float:
    v = float(fn(x))
    if not math.isfinite(v):
        raise ValueError(f"integrand returned non-finite value at x={x!r}")
    return v


def adaptive_simpson(fn: Callable[[float], float], a: float, b: float,
                     policy: QuadraturePolicy = QuadraturePolicy()) -> Tuple[float, float]:
    """Integrate fn over [a, b]; returns (value, err_estimate).

    Classic adaptive Simpson with Richardson acceptance (|S_fine - S_coarse|
    <= 15 * local tolerance) and tolerance halving on each split. Raises
    QuadratureError with the partial result attached if max_subdivisions is
    exhausted, and ValueError for a malformed interval or a non-finite
    integrand value.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if b <= a:
        raise ValueError("integration interval must have b > a")

    fa, fb = _eval(fn, a), _eval(fn, b)
    mid = 0.5 * (a + b)
    fm = _eval(fn, mid)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    value = 0.0
    err = 0.0
    splits = 0
    # stack entries: (a, fa, m, fm, b, fb, simpson(a,b), local_tol, depth)
    stack = [(a, fa, mid, fm, b, fb, whole, policy.abs_tol, 0)]
    while stack:
        xa, ya, xm, ym, xb, yb, s_ab, tol, depth = stack.pop()
        xl = 0.5 * (xa + xm)
        xr = 0.5 * (xm + xb)
        yl = _eval(fn, xl)
        yr = _eval(fn, xr)
        s_left = (xm - xa) / 6.0 * (ya + 4.0 * yl + ym)
        s_right = (xb - xm) / 6.0 * (ym + 4.0 * yr + yb)
        delta = s_left + s_right - s_ab
        # depth guard: below ~50 halvings the interval is at rounding width
        if abs(delta) <= 15.0 * tol or depth >= 50:
            value += s_left + s_right + delta / 15.0
            err += abs(delta) / 15.0
            continue
        splits += 1
        if splits > policy.max_subdivisions:
            # flush remaining intervals at their coarse estimates
            partial = value + s_left + s_right
            for item in stack:
                partial += item[6]
            raise QuadratureError(
                f"adaptive quadrature exceeded {policy.max_subdivisions} subdivisions",
                partial=partial,
                err_bound=math.inf,
            )
        half = 0.5 * tol
        stack.append((xa, ya, xl, yl, xm, ym, s_left, half, depth + 1))
        stack.append((xm, ym, xr, yr, xb, yb, s_right, half, depth + 1))
    return value, err

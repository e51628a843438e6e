"""Data-driven rules for the gamma-prior scale used by the plug-in predictive.

Three rules are provided. The moment rule alpha = r*b/(sum(x)+1) is the one
with a risk-dominance guarantee (for 0 < b <= d-2, d >= 3). The scaled-total
rule alpha = r*d/(2*sum(x)) maximizes the marginal likelihood of the prior
scale, and the unbiased-risk-estimate minimizer coincides with it exactly;
neither carries a dominance guarantee and nothing here claims one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import EstimatorUndefinedError
from .model import Counts, ModelConfig, check_dimension

__all__ = [
    "Moment",
    "MLE",
    "URE",
    "HyperRule",
    "alpha_moment",
    "alpha_mle",
    "alpha_for_rule",
    "ure_value",
    "ure_argmin",
    "ure_argmin_numeric",
    "dominance_guaranteed",
]


@dataclass(frozen=True)
class Moment:
    """Moment-matching rule alpha = r*b/(sum(x)+1) with shrink coefficient b."""

    b: float

    def __post_init__(self):
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b) and self.b > 0.0):
            raise ValueError("Moment rule requires finite b > 0")
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class MLE:
    """Marginal-likelihood rule alpha = r*d/(2*sum(x)); needs sum(x) > 0."""


@dataclass(frozen=True)
class URE:
    """Unbiased-risk-estimate minimizer; equals the MLE rule analytically."""


HyperRule = Union[Moment, MLE, URE]


def dominance_guaranteed(b: float, d: int) -> bool:
    """True when the moment rule's coefficient is in the guaranteed range."""
    return d >= 3 and 0.0 < b <= d - 2


def alpha_moment(sum_x: int, r: float, b: float) -> float:
    if sum_x < 0:
        raise ValueError("sum_x must be non-negative")
    if not (math.isfinite(r) and r > 0.0):
        raise ValueError("r must be finite and positive")
    if not (math.isfinite(b) and b > 0.0):
        raise ValueError("b must be finite and positive")
    return r * b / (sum_x + 1.0)


def alpha_mle(sum_x: int, r: float, d: int) -> float:
    if not (math.isfinite(r) and r > 0.0):
        raise ValueError("r must be finite and positive")
    if d < 1:
        raise ValueError("d must be a positive integer")
    if sum_x <= 0:
        raise EstimatorUndefinedError(
            "the scaled-total rule r*d/(2*sum(x)) is undefined at sum(x) = 0"
        )
    return r * d / (2.0 * sum_x)


def alpha_for_rule(rule: HyperRule, sum_x: int, cfg: ModelConfig) -> float:
    if isinstance(rule, Moment):
        return alpha_moment(sum_x, cfg.r, rule.b)
    if isinstance(rule, (MLE, URE)):
        return alpha_mle(sum_x, cfg.r, cfg.d)
    raise TypeError(f"unknown hyperparameter rule: {rule!r}")


def ure_value(alpha: float, x: Counts, cfg: ModelConfig) -> float:
    """Unbiased estimate of the predictive risk shift at prior scale alpha.

    U(alpha) = sum_i [ -(x_i + 1/2) * log((r+alpha)/(r+s+alpha))
                       + (s/r) * x_i * log(r+s+alpha) ].
    Only differences of U across alpha are meaningful; its minimizer matches
    the scaled-total rule.
    """
    if not (math.isfinite(alpha) and alpha >= 0.0):
        raise ValueError("alpha must be finite and non-negative")
    check_dimension(x, cfg, "x")
    r, s = cfg.r, cfg.s
    ratio = math.log((r + alpha) / (r + s + alpha))
    tail = math.log(r + s + alpha)
    return sum(-(xi + 0.5) * ratio + (s / r) * xi * tail for xi in x.values)


def ure_argmin(x: Counts, cfg: ModelConfig) -> float:
    """Minimizer of ure_value over alpha > 0; analytic, equals alpha_mle.

    Raises EstimatorUndefinedError at sum(x) = 0, where U is monotone in
    alpha and has no interior minimum.
    """
    check_dimension(x, cfg, "x")
    return alpha_mle(x.total, cfg.r, cfg.d)


def _ure_diff(a1: float, a2: float, x: Counts, cfg: ModelConfig) -> float:
    # U(a1) - U(a2) in log1p form. The raw U values are O(sum x) while the
    # difference near the minimum is far below eps*|U|, so subtracting two
    # ure_value outputs would drown the comparison in rounding noise.
    r, s = cfg.r, cfg.s
    h = a1 - a2
    t1 = math.log1p(h / (r + a2))
    t2 = math.log1p(h / (r + s + a2))
    total = x.total
    return -(total + 0.5 * cfg.d) * (t1 - t2) + (s / r) * total * t2


def ure_argmin_numeric(x: Counts, cfg: ModelConfig, lo: float = 1e-8,
                       hi: float = 1e4, tol: float = 1e-10) -> float:
    """Golden-section minimizer of ure_value; the slow cross-check path."""
    check_dimension(x, cfg, "x")
    if x.total <= 0:
        raise EstimatorUndefinedError(
            "sum(x) = 0: the risk estimate is monotone in alpha, no minimum"
        )
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        c = b - invphi * (b - a)
        d_ = a + invphi * (b - a)
        if _ure_diff(c, d_, x, cfg) < 0.0:
            b = d_
        else:
            a = c
    return 0.5 * (a + b)

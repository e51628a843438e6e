"""Predictive mass functions for future Poisson counts given observed counts.

Four families, all with exact log densities:

* Jeffreys: the posterior predictive under the improper per-coordinate
  density prod_i lambda_i^{-1/2};
* FixedGamma(alpha): the posterior predictive when each lambda_i has an
  independent Gamma(1/2, rate alpha) prior; alpha = 0 recovers Jeffreys;
* EmpiricalBayes(rule): FixedGamma with alpha chosen from the data by a
  rule from the hyper module;
* Shrinkage: the posterior predictive under the total-rate-coupled prior
  (sum_i lambda_i)^{1-d/2} * prod_i lambda_i^{-1/2}, defined for d >= 2.

The shrinkage density has a closed form derived by factoring both posterior
integrals through mu = sum(lambda): the direction integral is a Dirichlet
normalizer and the mu integral is gamma-type. Relative to Jeffreys,

    log pS - log pJ = (d/2 - 1) log((r+s)/r) + lnG(X+Y+1) + lnG(X+d/2)
                      - lnG(X+1) - lnG(X+Y+d/2),

with X = sum(x), Y = sum(y), so the ratio depends on the data only through
the totals. shrinkage_log_pred_quadrature evaluates the same density with
the mu integrals done numerically and is kept as the independent route the
closed form is tested against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, List, Tuple, Union

import numpy as np

from .errors import DominanceWarning, TruncationError
from .hyper import HyperRule, Moment, alpha_for_rule, dominance_guaranteed
from .model import Counts, ModelConfig, check_dimension
from .quadrature import QuadraturePolicy, adaptive_simpson
from .special import log_gamma

__all__ = [
    "Jeffreys",
    "FixedGamma",
    "EmpiricalBayes",
    "Shrinkage",
    "PredictiveFamily",
    "jeffreys_log_pred",
    "gamma_log_pred",
    "eb_log_pred",
    "shrinkage_log_pred",
    "shrink_log_ratio",
    "shrinkage_log_pred_quadrature",
    "log_pred",
    "log_pred_batch",
    "pred_pmf_table",
]


@dataclass(frozen=True)
class Jeffreys:
    pass


@dataclass(frozen=True)
class FixedGamma:
    alpha: float

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)
                and self.alpha >= 0.0):
            raise ValueError("FixedGamma requires finite alpha >= 0")
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class EmpiricalBayes:
    rule: HyperRule


@dataclass(frozen=True)
class Shrinkage:
    pass


PredictiveFamily = Union[Jeffreys, FixedGamma, EmpiricalBayes, Shrinkage]


def _gamma_terms(x: Counts, y: Counts) -> float:
    xv = np.asarray(x.values, dtype=float)
    yv = np.asarray(y.values, dtype=float)
    return float(
        np.sum(log_gamma(xv + yv + 0.5) - log_gamma(xv + 0.5) - log_gamma(yv + 1.0))
    )


def gamma_log_pred(x: Counts, y: Counts, alpha: float, cfg: ModelConfig) -> float:
    """Log predictive mass at y under the Gamma(1/2, rate alpha) prior.

    alpha = 0 is accepted and gives the Jeffreys predictive exactly.
    """
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha >= 0.0):
        raise ValueError("alpha must be finite and non-negative")
    check_dimension(x, cfg, "x")
    check_dimension(y, cfg, "y")
    r, s, d = cfg.r, cfg.s, cfg.d
    keep = math.log((r + alpha) / (r + s + alpha))
    new = math.log(s / (r + s + alpha))
    return (x.total + 0.5 * d) * keep + y.total * new + _gamma_terms(x, y)


def jeffreys_log_pred(x: Counts, y: Counts, cfg: ModelConfig) -> float:
    """Log predictive mass at y under the per-coordinate root-rate prior."""
    return gamma_log_pred(x, y, 0.0, cfg)


def eb_log_pred(x: Counts, y: Counts, rule: HyperRule, cfg: ModelConfig) -> float:
    """Log predictive mass with the prior scale chosen from x by `rule`.

    Emits DominanceWarning when a moment rule's coefficient lies outside the
    range with a risk guarantee (0 < b <= d-2, d >= 3); the value is still
    computed.
    """
    check_dimension(x, cfg, "x")
    if isinstance(rule, Moment) and not dominance_guaranteed(rule.b, cfg.d):
        warnings.warn(
            f"moment rule b={rule.b:g} is outside (0, d-2] for d={cfg.d}; "
            "no risk-dominance guarantee applies",
            DominanceWarning,
            stacklevel=2,
        )
    alpha = alpha_for_rule(rule, x.total, cfg)
    return gamma_log_pred(x, y, alpha, cfg)


def shrink_log_ratio(sum_x, sum_y, cfg: ModelConfig):
    """log pS(y|x) - log pJ(y|x); depends on the data only through the sums.

    Accepts scalars or ndarrays for the sums (broadcast together).
    """
    if cfg.d < 2:
        raise ValueError("the total-rate-coupled prior requires d >= 2")
    X = np.asarray(sum_x, dtype=float)
    Y = np.asarray(sum_y, dtype=float)
    half_d = 0.5 * cfg.d
    out = (
        (half_d - 1.0) * math.log((cfg.r + cfg.s) / cfg.r)
        + log_gamma(X + Y + 1.0)
        + log_gamma(X + half_d)
        - log_gamma(X + 1.0)
        - log_gamma(X + Y + half_d)
    )
    if np.ndim(sum_x) == 0 and np.ndim(sum_y) == 0:
        return float(out)
    return out


def shrinkage_log_pred(x: Counts, y: Counts, cfg: ModelConfig) -> float:
    """Log predictive mass at y under the total-rate-coupled prior (d >= 2)."""
    check_dimension(x, cfg, "x")
    check_dimension(y, cfg, "y")
    return jeffreys_log_pred(x, y, cfg) + shrink_log_ratio(x.total, y.total, cfg)


def shrinkage_log_pred_quadrature(x: Counts, y: Counts, cfg: ModelConfig,
                                  tol: float = 1e-10) -> float:
    """Numerical-integration route to the shrinkage log density.

    The direction integral over the rate simplex is a Dirichlet normalizer
    (exact gamma functions); the two total-rate integrals are evaluated by
    adaptive quadrature. Slow; exists to validate the closed form.
    """
    if cfg.d < 2:
        raise ValueError("the total-rate-coupled prior requires d >= 2")
    check_dimension(x, cfg, "x")
    check_dimension(y, cfg, "y")
    r, s, d = cfg.r, cfg.s, cfg.d
    X, Y = x.total, y.total

    def mu_integral(power: int, c: float) -> float:
        upper = (power + 1.0) * 3.0 / c + 60.0 / c
        fn = lambda u: math.exp(-c * u) * u ** power if u > 0.0 else (1.0 if power == 0 else 0.0)
        coarse, _ = adaptive_simpson(fn, 1e-300, upper, QuadraturePolicy(abs_tol=1e-6))
        value, _ = adaptive_simpson(
            fn, 1e-300, upper, QuadraturePolicy(abs_tol=max(tol * abs(coarse), 1e-250))
        )
        return value

    xv = np.asarray(x.values, dtype=float)
    yv = np.asarray(y.values, dtype=float)
    per_coord = float(
        np.sum(
            yv * math.log(s)
            - log_gamma(yv + 1.0)
            + log_gamma(xv + yv + 0.5)
            - log_gamma(xv + 0.5)
        )
    )
    dirichlet = log_gamma(X + 0.5 * d) - log_gamma(X + Y + 0.5 * d)
    return (
        per_coord
        + dirichlet
        + math.log(mu_integral(X + Y, r + s))
        - math.log(mu_integral(X, r))
    )


def log_pred(x: Counts, y: Counts, family: PredictiveFamily, cfg: ModelConfig) -> float:
    if isinstance(family, Jeffreys):
        return jeffreys_log_pred(x, y, cfg)
    if isinstance(family, FixedGamma):
        return gamma_log_pred(x, y, family.alpha, cfg)
    if isinstance(family, EmpiricalBayes):
        return eb_log_pred(x, y, family.rule, cfg)
    if isinstance(family, Shrinkage):
        return shrinkage_log_pred(x, y, cfg)
    raise TypeError(f"unknown predictive family: {family!r}")


def _resolve_alpha(x: Counts, family: PredictiveFamily, cfg: ModelConfig) -> float:
    if isinstance(family, Jeffreys):
        return 0.0
    if isinstance(family, FixedGamma):
        return family.alpha
    if isinstance(family, EmpiricalBayes):
        return alpha_for_rule(family.rule, x.total, cfg)
    raise TypeError(f"family has no single prior scale: {family!r}")


def log_pred_batch(x: Counts, ys: np.ndarray, family: PredictiveFamily,
                   cfg: ModelConfig) -> np.ndarray:
    """Log predictive mass at many y vectors at once.

    ys is an (N, d) array of non-negative integers; returns shape (N,).
    Matches log_pred row by row and exists because shell-by-shell
    enumeration (normalization checks, pmf tables) would otherwise pay a
    Python-loop cost per lattice point.
    """
    check_dimension(x, cfg, "x")
    ys = np.asarray(ys)
    if ys.ndim != 2 or ys.shape[1] != cfg.d:
        raise ValueError(f"ys must have shape (N, {cfg.d})")
    if ys.size and (np.any(ys < 0) or np.any(ys != np.floor(ys))):
        raise ValueError("ys must contain non-negative integers")
    yf = ys.astype(float)
    xv = np.asarray(x.values, dtype=float)
    ytot = yf.sum(axis=1)
    terms = (
        np.sum(log_gamma(xv[None, :] + yf + 0.5), axis=1)
        - float(np.sum(log_gamma(xv + 0.5)))
        - np.sum(log_gamma(yf + 1.0), axis=1)
    )
    r, s, d = cfg.r, cfg.s, cfg.d
    if isinstance(family, Shrinkage):
        keep = math.log(r / (r + s))
        new = math.log(s / (r + s))
        base = (x.total + 0.5 * d) * keep + ytot * new + terms
        return base + shrink_log_ratio(np.full_like(ytot, float(x.total)), ytot, cfg)
    alpha = _resolve_alpha(x, family, cfg)
    keep = math.log((r + alpha) / (r + s + alpha))
    new = math.log(s / (r + s + alpha))
    return (x.total + 0.5 * d) * keep + ytot * new + terms


def _compositions(total: int, d: int) -> Iterator[Tuple[int, ...]]:
    # ascending lexicographic within a fixed total
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, d - 1):
            yield (first,) + rest


def pred_pmf_table(x: Counts, family: PredictiveFamily, cfg: ModelConfig,
                   mass_tol: float = 1e-6,
                   max_entries: int = 200_000) -> List[Tuple[Tuple[int, ...], float]]:
    """Probability table of the predictive, heaviest entries first.

    Enumerates y vectors by total count, shell by shell, until the
    accumulated mass reaches 1 - mass_tol, then sorts by probability
    (descending, ties broken lexicographically). Raises TruncationError with
    the partial table attached if max_entries is hit first.
    """
    if not (0.0 < mass_tol < 1.0):
        raise ValueError("mass_tol must lie in (0, 1)")
    check_dimension(x, cfg, "x")
    entries: List[Tuple[Tuple[int, ...], float]] = []
    cum = 0.0
    shell = 0
    while cum < 1.0 - mass_tol:
        ys = np.array(list(_compositions(shell, cfg.d)), dtype=np.int64)
        probs = np.exp(log_pred_batch(x, ys, family, cfg))
        cum += float(np.sum(probs))
        entries.extend(
            (tuple(int(v) for v in row), float(p)) for row, p in zip(ys, probs)
        )
        if cum < 1.0 - mass_tol and len(entries) + _shell_size(shell + 1, cfg.d) > max_entries:
            entries.sort(key=lambda e: (-e[1], e[0]))
            exc = TruncationError(
                f"pmf table reached {len(entries)} entries at mass {cum:.12g} "
                f"before the {mass_tol:g} mass target",
                partial=cum,
                err_bound=1.0 - cum,
            )
            exc.partial_table = entries
            raise exc
        shell += 1
    entries.sort(key=lambda e: (-e[1], e[0]))
    return entries


def _shell_size(total: int, d: int) -> int:
    return math.comb(total + d - 1, d - 1)

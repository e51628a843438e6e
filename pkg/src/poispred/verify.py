"""Numerical verification suite for the inequalities behind the risk bounds.

Each checker evaluates one inequality family on a documented grid (dense
deterministic grids for 1-D statements, seeded log-uniform samples for
multi-parameter ones) and records the minimum margin, net of the certified
numerical error of the evaluation. A margin is always a quantity that the
claim says is positive, so `passed` is simply `min_margin > 0`.

Checkers record violations in the result rather than raising; `run_all`
additionally converts unexpected evaluation failures into failed entries so
a report is always produced.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional, Sequence

import numpy as np

from .model import ModelConfig
from .quadrature import QuadraturePolicy
from .risk import (
    bayes_risk_gap,
    f_shrink_with_err,
    g_deriv_with_err,
    risk_diff_eb,
    risk_jeffreys_direct,
)
from .special import SeriesPolicy

__all__ = [
    "CheckResult",
    "VerificationReport",
    "check_lemma1_bounds",
    "check_lemma2",
    "check_lemma21",
    "check_lemma22",
    "check_lemma23",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "run_all",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality check.

    min_margin is the smallest slack found, already reduced by the certified
    numerical error at that point; worst_point describes where it occurred.
    """

    name: str
    grid_size: int
    min_margin: float
    worst_point: list
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.min_margin > 0.0))

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "grid_size": self.grid_size,
            "min_margin": self.min_margin,
            "worst_point": list(self.worst_point),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: List[CheckResult]
    config: dict
    timestamp: str
    version: str

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "version": self.version,
            "timestamp": self.timestamp,
            "config": dict(self.config),
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent)

    def to_text(self) -> str:
        lines = [f"verification report ({self.timestamp}, version {self.version})"]
        width = max(len(c.name) for c in self.checks) if self.checks else 0
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"  {status}  {c.name:<{width}}  points={c.grid_size:<7d} "
                f"min_margin={c.min_margin:.6e}  worst={c.worst_point}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def check_lemma1_bounds() -> CheckResult:
    """f(lam) > -0.02 on a dense rate grid, and the sandwich on f's slope.

    The slope function g(lam) = E[log((x+3/2)/(x+1/2))] - 1/lam must sit
    strictly between
        0.09*exp(-lam) - exp(-lam)/lam              (below)
        0.06*exp(-lam) - exp(-lam)/lam + 0.26/lam^3 (above)
    for lam >= 1.5.
    """
    f_grid = np.concatenate([
        np.arange(0.01, 20.0001, 0.01),
        np.geomspace(20.0, 2000.0, 60),
        np.array([0.5, 1.0, 3.0, 4.0, 5.0, 7.0]) + 1e-4,
    ])
    worst = math.inf
    worst_pt: list = []
    for lam in f_grid:
        v, e = f_shrink_with_err(float(lam))
        m = (v + 0.02) - e
        if m < worst:
            worst, worst_pt = m, ["f_lower", float(lam), v]
    g_grid = np.concatenate([
        np.arange(1.5, 10.0001, 0.05),
        np.arange(10.5, 100.001, 0.5),
    ])
    for lam in g_grid:
        lam = float(lam)
        g, e = g_deriv_with_err(lam)
        lo = 0.09 * math.exp(-lam) - math.exp(-lam) / lam
        hi = 0.06 * math.exp(-lam) - math.exp(-lam) / lam + 0.26 / lam**3
        slack = e + 8.0 * _EPS * (abs(lo) + abs(hi) + 1.0 / lam)
        for side, m in (("g_lower", g - lo - slack), ("g_upper", hi - g - slack)):
            if m < worst:
                worst, worst_pt = m, [side, lam, g]
    return CheckResult(
        name="lemma1_bounds",
        grid_size=int(f_grid.size + 2 * g_grid.size),
        min_margin=worst,
        worst_point=worst_pt,
    )


def check_lemma2(samples: int = 100_000, seed: int = 42) -> CheckResult:
    """Positivity of the two-term log expression behind the plug-in bound.

    For all x, t, s > 0:
        -(x+t+1)*log(1 - (s/(1+s))*2t/(x+2t+1)) - s*x*log(1 + (1/(1+s))*2t/x) > 0.
    Sampled log-uniformly over [1e-3, 1e3]^3 plus the point (1, 1, 1).
    """
    rng = np.random.default_rng(seed)
    pts = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), size=(samples, 3)))
    pts = np.vstack([pts, [[1.0, 1.0, 1.0]]])
    x, t, s = pts[:, 0], pts[:, 1], pts[:, 2]
    term1 = -(x + t + 1.0) * np.log1p(-(s / (1.0 + s)) * 2.0 * t / (x + 2.0 * t + 1.0))
    term2 = -s * x * np.log1p((1.0 / (1.0 + s)) * 2.0 * t / x)
    vals = term1 + term2
    slack = 32.0 * _EPS * (np.abs(term1) + np.abs(term2))
    margins = vals - slack
    i = int(np.argmin(margins))
    return CheckResult(
        name="lemma2",
        grid_size=int(pts.shape[0]),
        min_margin=float(margins[i]),
        worst_point=[float(x[i]), float(t[i]), float(s[i]), float(vals[i])],
    )


def check_lemma21() -> CheckResult:
    """h(y) = y*log(1 + a/y) + a^2/(2(y+a)) is nondecreasing and below a.

    Checked for a in {1, 10}. Monotonicity is checked on y in [1e-3, 1e4]
    (past that the true increments drop below double-precision resolution);
    the ceiling a and the gap rate a - h(y) <= a^3/(4*y^2) are checked
    further out, where they are still well resolved.
    """

    def h_of(y, a):
        return y * np.log1p(a / y) + a * a / (2.0 * (y + a))

    worst = math.inf
    worst_pt: list = []
    count = 0
    for a in (1.0, 10.0):
        y_mono = np.geomspace(1e-3, 1e4, 3001)
        h = h_of(y_mono, a)
        diffs = np.diff(h) - 16.0 * _EPS * (a + 1.0)
        count += diffs.size
        i = int(np.argmin(diffs))
        if diffs[i] < worst:
            worst, worst_pt = float(diffs[i]), ["monotone", a, float(y_mono[i])]

        y_all = np.geomspace(1e-3, 1e6, 4001)
        below = (a - h_of(y_all, a)) - 16.0 * _EPS * (a + 1.0)
        count += below.size
        j = int(np.argmin(below))
        if below[j] < worst:
            worst, worst_pt = float(below[j]), ["below_limit", a, float(y_all[j])]

        y_probe = 1e3
        gap_margin = a**3 / (4.0 * y_probe**2) - (a - float(h_of(y_probe, a)))
        gap_margin -= 16.0 * _EPS * (a + 1.0)
        count += 1
        if gap_margin < worst:
            worst, worst_pt = gap_margin, ["limit_rate", a, y_probe]
    return CheckResult(
        name="lemma21", grid_size=count, min_margin=worst, worst_point=worst_pt
    )


def check_lemma22(samples: int = 100_000, seed: int = 42) -> CheckResult:
    """Derivative-positivity inequality on the branch s in (0, 1]:

        ((1-s)x + t + 1) / ((x + 2t/(1+s)) * ((x+t+1)/s + 2t/(1+s)))
          > s(1-s)/(x + 2t + 1)        for x, t > 0.
    """
    rng = np.random.default_rng(seed)
    x = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), samples))
    t = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), samples))
    s = rng.uniform(0.0, 1.0, samples)
    s = np.maximum(s, 1e-12)
    s[0] = 1.0  # include the branch point
    pos = ((1.0 - s) * x + t + 1.0) / (
        (x + 2.0 * t / (1.0 + s)) * ((x + t + 1.0) / s + 2.0 * t / (1.0 + s))
    )
    neg = s * (1.0 - s) / (x + 2.0 * t + 1.0)
    vals = pos - neg
    slack = 32.0 * _EPS * (pos + neg)
    margins = vals - slack
    i = int(np.argmin(margins))
    return CheckResult(
        name="lemma22",
        grid_size=samples,
        min_margin=float(margins[i]),
        worst_point=[float(x[i]), float(t[i]), float(s[i]), float(vals[i])],
    )


def check_lemma23(samples: int = 100_000, seed: int = 42) -> CheckResult:
    """Derivative-positivity inequality on the branch s >= 1:

        (2/(1+s)^2) * t/(x+2t+1-2st/(1+s)) + (2s/(1+s)^2) * t/(x+t+1+2t/(1+s))
          > log(1 + 2t/((1+s)(x+t+1)))    for x, t > 0.

    The two sides cancel to third order as t -> 0, leaving true values near
    1e-23 inside the sampling box, so this check runs in extended precision
    (where the platform provides it) with the slack scaled accordingly.
    """
    rng = np.random.default_rng(seed)
    x = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), samples)).astype(np.longdouble)
    t = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), samples)).astype(np.longdouble)
    s = np.exp(rng.uniform(0.0, math.log(1e3), samples)).astype(np.longdouble)
    s[0] = 1.0  # include the branch point
    one = np.longdouble(1.0)
    q = 2.0 * t / (one + s)
    pos = (one / (one + s)) * q / (x + 2.0 * t + one - s * q) + (
        s / (one + s)
    ) * q / (x + t + one + q)
    neg = np.log1p(q / (x + t + one))
    vals = pos - neg
    slack = 32.0 * np.finfo(np.longdouble).eps * (pos + neg)
    margins = (vals - slack).astype(float)
    i = int(np.argmin(margins))
    return CheckResult(
        name="lemma23",
        grid_size=samples,
        min_margin=float(margins[i]),
        worst_point=[float(x[i]), float(t[i]), float(s[i]), float(vals[i])],
    )


_THEOREM1_GRID = [
    (d, scale, rs)
    for d in (1, 3, 8)
    for scale in (0.1, 1.0, 10.0)
    for rs in ((1.0, 1.0), (2.0, 1.0), (1.0, 3.0))
]


def check_theorem1(policy: SeriesPolicy = SeriesPolicy()) -> CheckResult:
    """Risk sandwich for the root-rate predictive:

        0 < risk(lambda) < 0.52 * d * log((r+s)/r)

    on a 27-configuration grid of dimensions, rate scales and exposures.
    """
    worst = math.inf
    worst_pt: list = []
    for d, scale, (r, s) in _THEOREM1_GRID:
        cfg = ModelConfig(d=d, r=r, s=s)
        vec = [scale * (1.0 + 0.3 * i) for i in range(d)]
        pt = risk_jeffreys_direct(vec, cfg, policy)
        ub = 0.52 * d * math.log((r + s) / r)
        for side, m in (
            ("lower", pt.value - pt.err_bound),
            ("upper", ub - pt.value - pt.err_bound - 8.0 * _EPS * ub),
        ):
            if m < worst:
                worst, worst_pt = m, [side, d, scale, r, s, pt.value]
    return CheckResult(
        name="theorem1",
        grid_size=2 * len(_THEOREM1_GRID),
        min_margin=worst,
        worst_point=worst_pt,
    )


def check_theorem2(quad: QuadraturePolicy = QuadraturePolicy()) -> CheckResult:
    """Prior-averaged risk approaches d/2 * log((r+s)/r) as the prior widens.

    The absolute gap must decrease strictly along n in {10, 10^2, 10^3, 10^4}
    and finish below a tenth of its first value (d=3, r=s=1).
    """
    cfg = ModelConfig(d=3, r=1.0, s=1.0)
    target = 0.5 * cfg.d * math.log((cfg.r + cfg.s) / cfg.r)
    ns = (10.0, 100.0, 1000.0, 10000.0)
    gaps = []
    rights = []
    for n in ns:
        g = bayes_risk_gap(n, cfg, quad=quad)
        gaps.append(abs(g.total - target))
        rights.append(abs(g.right))
    slack = 100.0 * quad.abs_tol
    margins = [gaps[i] - gaps[i + 1] - 2.0 * slack for i in range(len(ns) - 1)]
    margins.append(gaps[0] / 10.0 - gaps[-1] - 2.0 * slack)
    margins.append(1e-3 - rights[-1])
    labels = ["decrease_1", "decrease_2", "decrease_3", "tenfold", "right_term_to_zero"]
    i = int(np.argmin(margins))
    return CheckResult(
        name="theorem2",
        grid_size=len(ns),
        min_margin=float(margins[i]),
        worst_point=[labels[i], [float(n) for n in ns], gaps],
    )


def check_theorem3(policy: SeriesPolicy = SeriesPolicy()) -> CheckResult:
    """Strict risk improvement of the moment plug-in rule:

        risk(root-rate) - risk(plug-in with b) > 0

    for d in {3, 8}, b in {d/2 - 1, d - 2}, over 60 log-spaced totals
    mu in [0.1, 50], with margins taken net of the certified series error.
    """
    mus = np.geomspace(0.1, 50.0, 60)
    worst = math.inf
    worst_pt: list = []
    count = 0
    for d in (3, 8):
        cfg = ModelConfig(d=d, r=1.0, s=1.0)
        for b in (0.5 * d - 1.0, float(d - 2)):
            for mu in mus:
                pt = risk_diff_eb(float(mu), b, cfg, policy)
                count += 1
                m = pt.value - pt.err_bound
                if m < worst:
                    worst, worst_pt = m, [d, b, float(mu), pt.value]
    return CheckResult(
        name="theorem3", grid_size=count, min_margin=worst, worst_point=worst_pt
    )


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = int(epoch) if epoch is not None else int(time.time())
    return datetime.fromtimestamp(when, tz=timezone.utc).isoformat()


_ALL_CHECKS: Sequence = (
    ("lemma1_bounds", lambda samples, seed: check_lemma1_bounds()),
    ("lemma2", lambda samples, seed: check_lemma2(samples, seed)),
    ("lemma21", lambda samples, seed: check_lemma21()),
    ("lemma22", lambda samples, seed: check_lemma22(samples, seed)),
    ("lemma23", lambda samples, seed: check_lemma23(samples, seed)),
    ("theorem1", lambda samples, seed: check_theorem1()),
    ("theorem2", lambda samples, seed: check_theorem2()),
    ("theorem3", lambda samples, seed: check_theorem3()),
)


def run_all(samples: int = 100_000, seed: int = 42,
            only: Optional[Sequence[str]] = None) -> VerificationReport:
    """Run every checker (or the named subset) and assemble a report.

    Unexpected evaluation failures become failed entries with an infinite
    negative margin, so the report always covers the requested set.
    """
    from . import __version__

    selected = list(_ALL_CHECKS)
    if only is not None:
        wanted = set(only)
        unknown = wanted - {name for name, _ in _ALL_CHECKS}
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        selected = [(n, fn) for n, fn in _ALL_CHECKS if n in wanted]
    results = []
    for name, fn in selected:
        try:
            results.append(fn(samples, seed))
        except Exception as exc:  # record, never lose the report
            results.append(
                CheckResult(
                    name=name,
                    grid_size=0,
                    min_margin=-math.inf,
                    worst_point=["error", f"{type(exc).__name__}: {exc}"],
                )
            )
    return VerificationReport(
        checks=results,
        config={"samples": samples, "seed": seed,
                "only": sorted(only) if only is not None else None},
        timestamp=_timestamp(),
        version=__version__,
    )

"""Acceptance gate: eleven pass/fail criteria covering the whole library.

Each test prints one `[criterion NN] name: PASS|FAIL` line (visible under
`pytest -s` or in captured output on failure) and then asserts. The criteria
are ordered; together they exercise the risk routines, the predictive
families, the inequality checks and the hyperparameter rules end to end.
"""

import math
import time

import numpy as np
from scipy.stats import poisson

from poispred.hyper import Moment, alpha_mle, ure_argmin, ure_argmin_numeric
from poispred.model import Counts, ModelConfig
from poispred.predictive import (
    EmpiricalBayes,
    FixedGamma,
    Jeffreys,
    Shrinkage,
    log_pred,
    pred_pmf_table,
    shrinkage_log_pred_quadrature,
)
from poispred.risk import (
    f_shrink_with_err,
    risk_diff_eb,
    risk_diff_eb_unreduced,
    risk_diff_shrinkage,
    risk_jeffreys_direct,
    risk_jeffreys_integral,
)
from poispred.verify import (
    check_lemma1_bounds,
    check_lemma2,
    check_lemma22,
    check_lemma23,
    check_theorem1,
    check_theorem2,
    check_theorem3,
)


def _verdict(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'}"
    print(line)
    assert ok, detail or line


def test_criterion_01_integrand_minimum():
    spots = []
    for lam, floor in ((3.0, 0.0), (4.0, -0.0082), (5.0, -0.011)):
        v, e = f_shrink_with_err(lam)
        spots.append(v - e > floor)

    lams = [0.01 * k for k in range(1, 2001)]
    vals = [f_shrink_with_err(l)[0] for l in lams]
    i = int(np.argmin(vals))
    ok = (
        all(spots)
        and 4.5 <= lams[i] <= 5.5
        and -0.0115 <= vals[i] <= -0.0105
    )
    _verdict(1, "integrand minimum", ok,
             f"spots={spots} argmin={lams[i]} min={vals[i]}")


def test_criterion_02_scalar_bound_certificates():
    res = check_lemma1_bounds()
    _verdict(2, "scalar bound certificates", res.passed,
             f"min_margin={res.min_margin} at {res.worst_point}")


def test_criterion_03_baseline_risk_sandwich():
    res = check_theorem1()
    _verdict(3, "baseline risk sandwich", res.passed,
             f"min_margin={res.min_margin} at {res.worst_point}")


def test_criterion_04_wide_prior_gap_decay():
    t0 = time.monotonic()
    res = check_theorem2()
    elapsed = time.monotonic() - t0
    ok = res.passed and elapsed < 60.0
    _verdict(4, "wide-prior gap decay", ok,
             f"min_margin={res.min_margin} elapsed={elapsed:.1f}s")


def test_criterion_05_plug_in_dominance():
    res = check_theorem3()
    _verdict(5, "plug-in dominance margins", res.passed,
             f"min_margin={res.min_margin} at {res.worst_point}")


def _enumerated_improvement(lam_vec, b, cfg, cap=40):
    # Brute-force oracle: multivariate expectation over x of the closed-form
    # inner y-expectation of the log predictive ratio. Po(r*mu) mass beyond
    # the cap is ~1e-28 at mu=3.
    r, s = cfg.r, cfg.s
    mu = float(sum(lam_vec))
    totals = np.arange(cap + 1)
    a = r * b / (totals + 1.0)
    inner = (totals + cfg.d / 2.0) * (np.log((r + a) / (r + s + a))
                                      - math.log(r / (r + s))) \
        + s * mu * np.log((r + s) / (r + s + a))
    pmfs = [poisson.pmf(np.arange(cap + 1), r * l) for l in lam_vec]
    w = pmfs[0][:, None, None] * pmfs[1][None, :, None] * pmfs[2][None, None, :]
    t = (np.arange(cap + 1)[:, None, None] + np.arange(cap + 1)[None, :, None]
         + np.arange(cap + 1)[None, None, :])
    mask = t <= cap
    return float(np.sum(w[mask] * inner[t[mask]]))


def test_criterion_06_reduction_identity():
    points = [(0.3, 3, 0.5), (1.0, 3, 0.5), (3.0, 3, 1.0),
              (10.0, 4, 1.0), (5.0, 8, 3.0), (30.0, 8, 6.0)]
    worst_pair = 0.0
    for mu, d, b in points:
        cfg = ModelConfig(d=d, r=1.0, s=1.0)
        a = risk_diff_eb(mu, b, cfg).value
        u = risk_diff_eb_unreduced(mu, b, cfg).value
        worst_pair = max(worst_pair, abs(a - u))

    cfg3 = ModelConfig(d=3, r=1.0, s=1.0)
    e1 = _enumerated_improvement((1.0, 1.0, 1.0), 0.5, cfg3)
    e2 = _enumerated_improvement((2.9, 0.05, 0.05), 0.5, cfg3)
    series = risk_diff_eb(3.0, 0.5, cfg3).value
    worst_enum = max(abs(e1 - e2), abs(e1 - series), abs(e2 - series))

    ok = worst_pair < 1e-9 and worst_enum < 1e-6
    _verdict(6, "reduction identity", ok,
             f"worst reduced/unreduced diff={worst_pair:.3e} "
             f"worst enumeration diff={worst_enum:.3e}")


def test_criterion_07_direct_vs_integral():
    worst = 0.0
    for d in (1, 3, 8):
        for scale in (0.1, 1.0, 10.0):
            for r, s in ((1.0, 1.0), (2.0, 1.0), (1.0, 3.0)):
                cfg = ModelConfig(d=d, r=r, s=s)
                vec = [scale * (1.0 + 0.3 * i) for i in range(d)]
                a = risk_jeffreys_direct(vec, cfg).value
                b = risk_jeffreys_integral(vec, cfg).value
                worst = max(worst, abs(a - b))
    _verdict(7, "direct vs integral risk", worst < 1e-6,
             f"worst |direct-integral|={worst:.3e}")


def test_criterion_08_improvement_curve_ordering():
    cfg = ModelConfig(d=3, r=1.0, s=1.0)

    def triple(mu):
        return (risk_diff_eb(mu, 1.0, cfg), risk_diff_eb(mu, 0.5, cfg),
                risk_diff_shrinkage(mu, cfg))

    def above(p, q):
        return p.value - q.value > p.err_bound + q.err_bound

    ok = True
    for mu in (0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
        big, small, shr = triple(mu)
        ok = ok and above(big, small) and above(big, shr)
    for mu in (4.5, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 50.0):
        big, small, shr = triple(mu)
        ok = ok and above(small, big) and above(shr, big)
    for mu in (2.5, 2.75, 3.0, 3.25, 3.5):
        _, small, shr = triple(mu)
        ok = ok and above(small, shr)
    _verdict(8, "improvement curve ordering", ok)


def _all_counts(d, cap):
    if d == 1:
        return [(k,) for k in range(cap + 1)]
    return [(k,) + rest for k in range(cap + 1)
            for rest in _all_counts(d - 1, cap - k)]


def test_criterion_09_normalization():
    worst_mass = 0.0
    for d in (1, 2, 3):
        cfg = ModelConfig(d=d, r=1.0, s=1.0)
        families = [Jeffreys(), FixedGamma(0.7), EmpiricalBayes(Moment(0.5))]
        if d >= 2:  # the coupled prior needs at least two coordinates
            families.append(Shrinkage())
        for fam in families:
            for xs in _all_counts(d, 3):
                rows = pred_pmf_table(Counts.of(xs), fam, cfg, mass_tol=1e-11)
                total = math.fsum(p for _, p in rows)
                worst_mass = max(worst_mass, abs(total - 1.0))

    worst_quad = 0.0
    for d in (2, 3, 4):
        cfg = ModelConfig(d=d, r=1.0, s=1.0)
        for xs in _all_counts(d, 2):
            for ys in _all_counts(d, 2):
                x, y = Counts.of(xs), Counts.of(ys)
                closed = math.exp(log_pred(x, y, Shrinkage(), cfg))
                oracle = math.exp(shrinkage_log_pred_quadrature(x, y, cfg))
                worst_quad = max(worst_quad, abs(closed - oracle))

    ok = worst_mass <= 1e-10 and worst_quad <= 1e-8
    _verdict(9, "predictive normalization", ok,
             f"worst |mass-1|={worst_mass:.3e} worst quad diff={worst_quad:.3e}")


def test_criterion_10_auxiliary_inequalities():
    r2 = check_lemma2(samples=100_000)
    r22 = check_lemma22(samples=100_000)
    r23 = check_lemma23(samples=100_000)
    hand = -3.0 * math.log(0.75) - math.log(2.0)
    ok = (r2.passed and r22.passed and r23.passed
          and abs(hand - 0.16990) <= 1e-4)
    _verdict(10, "auxiliary inequality suite", ok,
             f"margins=({r2.min_margin:.3e}, {r22.min_margin:.3e}, "
             f"{r23.min_margin:.3e}) hand={hand:.6f}")


def test_criterion_11_hyperparameter_consistency():
    worst = 0.0
    for d in (1, 3, 8):
        for r in (0.5, 1.0, 2.0):
            for s in (0.5, 1.0, 2.0):
                cfg = ModelConfig(d=d, r=r, s=s)
                for total in range(1, 21):
                    x = Counts.of([total] + [0] * (d - 1))
                    closed = r * d / (2.0 * total)
                    a1 = ure_argmin(x, cfg)
                    a2 = alpha_mle(total, r, d)
                    worst = max(worst, abs(a1 - a2) / closed,
                                abs(a1 - closed) / closed)

    worst_num = 0.0
    for d, r, s, total in ((4, 1.0, 1.0, 8), (3, 2.0, 1.0, 3), (1, 1.0, 5.0, 2)):
        cfg = ModelConfig(d=d, r=r, s=s)
        x = Counts.of([total] + [0] * (d - 1))
        closed = r * d / (2.0 * total)
        num = ure_argmin_numeric(x, cfg)
        worst_num = max(worst_num, abs(num - closed) / closed)

    ok = worst <= 1e-8 and worst_num <= 1e-8
    _verdict(11, "hyperparameter consistency", ok,
             f"worst analytic rel={worst:.3e} worst numeric rel={worst_num:.3e}")

import math

import numpy as np
import pytest

from poispred.model import ModelConfig
from poispred.risk import (
    BayesRiskGap,
    L_truncated,
    RiskPoint,
    bayes_risk_gap,
    f_shrink,
    f_shrink_with_err,
    g_deriv,
    g_deriv_with_err,
    risk_diff_eb,
    risk_diff_eb_unreduced,
    risk_diff_shrinkage,
    risk_eb,
    risk_jeffreys_direct,
    risk_jeffreys_integral,
)

CFG3 = ModelConfig(d=3, r=1.0, s=1.0)

# frozen from a 40-digit windowed-series evaluation
F_REFS = {
    3.0: 0.0057917023001715618559,
    4.0: -0.0080190000229034953744,
    5.0: -0.010591323366402805261,
    100.0: -0.00042524129720961023497,
}


@pytest.mark.parametrize("lam,ref", sorted(F_REFS.items()))
def test_f_reference_values(lam, ref):
    v, e = f_shrink_with_err(lam)
    assert abs(v - ref) <= max(e, 5e-14)


def test_f_limits_and_floor():
    assert f_shrink(1e-9) == pytest.approx(0.0, abs=1e-7)
    assert f_shrink(1e5) == pytest.approx(0.0, abs=1e-3)
    grid = np.arange(0.05, 20.0001, 0.05)
    vals = np.array([f_shrink(float(l)) for l in grid])
    assert vals.min() > -0.02
    assert vals.max() < 0.5
    i = int(np.argmin(vals))
    assert 4.5 <= grid[i] <= 5.5


def test_truncated_series_is_lower_bound_nearby():
    for lam in (3.0, 4.0, 5.0):
        L = L_truncated(lam)
        v = f_shrink(lam)
        assert L < v
        assert v - L < 1e-5


def test_slope_function():
    assert g_deriv(0.01) < -90.0
    for lam in (1.5, 2.0, 5.0, 30.0, 100.0):
        g, e = g_deriv_with_err(lam)
        lo = 0.09 * math.exp(-lam) - math.exp(-lam) / lam
        hi = 0.06 * math.exp(-lam) - math.exp(-lam) / lam + 0.26 / lam**3
        assert lo + e < g < hi - e


def test_rate_validation():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            f_shrink(bad)


def test_direct_and_integral_routes_agree():
    cases = [
        (ModelConfig(d=1, r=1.0, s=1.0), [1.0]),
        (ModelConfig(d=3, r=2.0, s=1.0), [0.1, 0.13, 0.16]),
        (ModelConfig(d=3, r=1.0, s=3.0), [1.0, 1.3, 1.6]),
    ]
    for cfg, vec in cases:
        a = risk_jeffreys_direct(vec, cfg)
        b = risk_jeffreys_integral(vec, cfg)
        assert abs(a.value - b.value) < 1e-6
        assert a.value > 0.0
        assert a.value < 0.52 * cfg.d * math.log((cfg.r + cfg.s) / cfg.r)


# frozen from the windowed-series evaluation, cross-checked against the
# 2-D route below
EB_REFS = [
    (0.3, 3, 0.5, 0.2124020752650443),
    (1.0, 3, 0.5, 0.1210899000334301),
    (3.0, 3, 1.0, 0.03838501572425867),
    (10.0, 4, 1.0, 0.0251873756158543),
    (5.0, 8, 3.0, 0.3813175608768126),
    (30.0, 8, 6.0, 0.01700640701004065),
]


@pytest.mark.parametrize("mu,d,b,ref", EB_REFS)
def test_plugin_risk_difference_frozen_values(mu, d, b, ref):
    cfg = ModelConfig(d=d, r=1.0, s=1.0)
    pt = risk_diff_eb(mu, b, cfg)
    assert pt.value == pytest.approx(ref, abs=1e-12)


def test_plugin_risk_difference_small_rate_limit():
    # frozen: (d/2) * log((r+s+b)/(r+s+b*r/(r+s))) at d=3, b=1/2, r=s=1
    limit = 0.27348233519093193932
    pt = risk_diff_eb(1e-6, 0.5, CFG3)
    assert pt.value == pytest.approx(limit, abs=1e-5)


def test_plugin_risk_difference_decays():
    pt = risk_diff_eb(1000.0, 0.5, CFG3)
    assert 0.0 < pt.value < 1e-2
    vals = [risk_diff_eb(m, 0.5, CFG3).value for m in (0.5, 2.0, 8.0, 32.0)]
    assert all(v > 0 for v in vals)
    assert vals == sorted(vals, reverse=True)


@pytest.mark.parametrize("mu,d,b", [(0.3, 3, 0.5), (3.0, 3, 1.0), (5.0, 8, 3.0)])
def test_reduction_identity(mu, d, b):
    cfg = ModelConfig(d=d, r=1.0, s=1.0)
    fast = risk_diff_eb(mu, b, cfg)
    slow = risk_diff_eb_unreduced(mu, b, cfg)
    assert abs(fast.value - slow.value) < 1e-9


def test_coupled_prior_difference():
    cfg2 = ModelConfig(d=2, r=1.0, s=1.0)
    for mu in (0.5, 2.0, 10.0):
        pt = risk_diff_shrinkage(mu, cfg2)
        assert abs(pt.value) <= pt.err_bound
    with pytest.raises(ValueError):
        risk_diff_shrinkage(1.0, ModelConfig(d=1, r=1.0, s=1.0))
    # frozen values, d=3 r=s=1
    for mu, ref in [(0.5, 0.19839757335798275), (3.0, 0.029560308920917933),
                    (20.0, 0.0032089154737547443)]:
        pt = risk_diff_shrinkage(mu, CFG3)
        assert pt.value == pytest.approx(ref, abs=1e-9)
        assert pt.value - pt.err_bound > 0.0
    # frozen: (d/2 - 1) * log((r+s)/r) at d=3, r=s=1
    assert risk_diff_shrinkage(1e-6, CFG3).value == pytest.approx(
        0.34657359027997265471, abs=1e-5
    )


def test_absolute_plugin_risk():
    pt = risk_eb(3.0, 0.5, CFG3)
    base = risk_jeffreys_direct([1.0, 1.0, 1.0], CFG3)
    diff = risk_diff_eb(3.0, 0.5, CFG3)
    assert pt.value == pytest.approx(base.value - diff.value, abs=1e-14)
    assert pt.value < base.value


def test_prior_averaged_gap_values():
    g10 = bayes_risk_gap(10.0, CFG3)
    assert isinstance(g10, BayesRiskGap)
    assert g10.total == pytest.approx(g10.left + g10.right, abs=1e-14)
    # frozen from the nested-quadrature evaluation
    assert g10.left == pytest.approx(0.9091775778, abs=1e-7)
    assert g10.right == pytest.approx(-0.0357277954, abs=1e-10)
    g100 = bayes_risk_gap(100.0, CFG3)
    assert g100.total == pytest.approx(0.9947848907, abs=1e-7)
    target = 1.5 * math.log(2.0)
    assert abs(g100.total - target) < abs(g10.total - target)
    # the exact closed-form right term behaves like -d*s/(4n*r*(r+s))
    assert g100.right == pytest.approx(-3.0 / (4.0 * 100.0 * 2.0), rel=0.01)


def test_risk_point_validation():
    with pytest.raises(ValueError):
        RiskPoint(value=1.0, err_bound=0.0)
    with pytest.raises(ValueError):
        RiskPoint(value=1.0, err_bound=0.0, mu=1.0, lambda_vec=(1.0,))
    with pytest.raises(ValueError):
        risk_jeffreys_direct([1.0, 2.0], CFG3)  # wrong length
    with pytest.raises(ValueError):
        risk_diff_eb(-1.0, 0.5, CFG3)
    with pytest.raises(ValueError):
        risk_diff_eb(1.0, 0.0, CFG3)

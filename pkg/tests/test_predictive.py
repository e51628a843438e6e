import itertools
import math

import numpy as np
import pytest

from poispred.errors import DominanceWarning, TruncationError
from poispred.hyper import MLE, Moment
from poispred.model import Counts, ModelConfig
from poispred.predictive import (
    EmpiricalBayes,
    FixedGamma,
    Jeffreys,
    Shrinkage,
    gamma_log_pred,
    jeffreys_log_pred,
    log_pred,
    log_pred_batch,
    pred_pmf_table,
    shrink_log_ratio,
    shrinkage_log_pred,
    shrinkage_log_pred_quadrature,
)

C1 = ModelConfig(d=1, r=1.0, s=1.0)


def _p(x, y, family, cfg):
    return math.exp(log_pred(Counts.of(x), Counts.of(y), family, cfg))


# frozen from the closed forms evaluated in 40-digit arithmetic
def test_baseline_spot_values():
    assert _p([0], [0], Jeffreys(), C1) == pytest.approx(0.7071067811865475244, abs=1e-15)
    assert _p([0], [1], Jeffreys(), C1) == pytest.approx(0.1767766952966368811, abs=1e-15)
    cfg2 = ModelConfig(d=2, r=1.0, s=1.0)
    assert _p([1, 0], [0, 0], Jeffreys(), cfg2) == pytest.approx(0.25, abs=1e-15)


def test_gamma_spot_values():
    fam = FixedGamma(alpha=1.0)
    assert _p([0], [0], fam, C1) == pytest.approx(0.81649658092772603273, abs=1e-15)
    assert _p([0], [1], fam, C1) == pytest.approx(0.13608276348795433879, abs=1e-15)


def test_gamma_alpha_zero_is_exactly_baseline():
    cfg = ModelConfig(d=3, r=1.7, s=0.4)
    for x, y in itertools.product([(0, 0, 0), (2, 1, 0), (5, 0, 3)], repeat=2):
        a = gamma_log_pred(Counts.of(x), Counts.of(y), 0.0, cfg)
        b = jeffreys_log_pred(Counts.of(x), Counts.of(y), cfg)
        assert a == b


def test_permutation_equivariance():
    cfg = ModelConfig(d=3, r=1.2, s=0.8)
    x, y = (3, 0, 1), (1, 2, 0)
    perms = list(itertools.permutations(range(3)))
    for fam in (Jeffreys(), FixedGamma(alpha=0.7),
                EmpiricalBayes(rule=Moment(b=0.5)), Shrinkage()):
        base = log_pred(Counts.of(x), Counts.of(y), fam, cfg)
        for p in perms:
            xp = Counts.of([x[i] for i in p])
            yp = Counts.of([y[i] for i in p])
            assert log_pred(xp, yp, fam, cfg) == pytest.approx(base, abs=1e-13)


def test_coupled_prior_matches_quadrature_oracle():
    # independent route: the prior integral evaluated by adaptive quadrature
    for d in (2, 3, 4):
        cfg = ModelConfig(d=d, r=1.3, s=0.7)
        vecs = [v for total in range(3)
                for v in itertools.product(range(total + 1), repeat=d)
                if sum(v) == total]
        for x in vecs:
            for y in vecs:
                closed = shrinkage_log_pred(Counts.of(x), Counts.of(y), cfg)
                oracle = shrinkage_log_pred_quadrature(Counts.of(x), Counts.of(y), cfg)
                assert closed == pytest.approx(oracle, abs=1e-8)


def test_coupled_prior_collapses_at_two_coordinates():
    cfg = ModelConfig(d=2, r=1.0, s=2.0)
    for x, y in itertools.product([(0, 0), (1, 2), (4, 0)], repeat=2):
        assert shrink_log_ratio(sum(x), sum(y), cfg) == pytest.approx(0.0, abs=5e-13)


def test_coupled_prior_needs_two_coordinates():
    with pytest.raises(ValueError):
        shrinkage_log_pred(Counts.of([1]), Counts.of([0]), C1)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_normalization_all_families(d):
    cfg = ModelConfig(d=d, r=1.0, s=1.0)
    families = [Jeffreys(), FixedGamma(alpha=0.8), EmpiricalBayes(rule=Moment(b=0.5))]
    if d >= 2:
        families.append(Shrinkage())
    xs = [v for total in range(4)
          for v in itertools.product(range(total + 1), repeat=d)
          if sum(v) == total]
    for fam in families:
        for x in xs[:: max(1, len(xs) // 4)]:  # a few observed vectors per d
            rows = pred_pmf_table(Counts.of(x), fam, cfg, mass_tol=1e-11)
            total = sum(p for _, p in rows)
            assert total == pytest.approx(1.0, abs=1e-10)


def test_table_is_sorted_and_mass_covered():
    cfg = ModelConfig(d=2, r=1.0, s=1.0)
    rows = pred_pmf_table(Counts.of([1, 1]), Jeffreys(), cfg, mass_tol=1e-4)
    probs = [p for _, p in rows]
    assert probs == sorted(probs, reverse=True)
    assert sum(probs) >= 1.0 - 1e-4
    assert len(set(y for y, _ in rows)) == len(rows)


def test_table_cap_raises_with_partial():
    cfg = ModelConfig(d=3, r=1.0, s=1.0)
    with pytest.raises(TruncationError) as excinfo:
        pred_pmf_table(Counts.of([0, 0, 0]), Jeffreys(), cfg,
                       mass_tol=1e-12, max_entries=5)
    partial = excinfo.value.partial_table
    assert 1 <= len(partial) <= 5
    assert all(p > 0 for _, p in partial)


def test_batch_equals_scalar():
    cfg = ModelConfig(d=3, r=1.0, s=2.0)
    x = Counts.of([2, 0, 1])
    ys = np.array([[0, 0, 0], [1, 0, 0], [2, 3, 1], [0, 5, 0]])
    for fam in (Jeffreys(), FixedGamma(alpha=0.3),
                EmpiricalBayes(rule=Moment(b=0.5)), Shrinkage()):
        batch = log_pred_batch(x, ys, fam, cfg)
        single = [log_pred(x, Counts.of(list(y)), fam, cfg) for y in ys]
        assert np.allclose(batch, single, atol=1e-14, rtol=0.0)


def test_moment_rule_outside_guarantee_warns():
    cfg = ModelConfig(d=3, r=1.0, s=1.0)
    with pytest.warns(DominanceWarning):
        log_pred(Counts.of([1, 0, 0]), Counts.of([0, 0, 0]),
                 EmpiricalBayes(rule=Moment(b=5.0)), cfg)


def test_mle_rule_undefined_at_zero_total():
    from poispred.errors import EstimatorUndefinedError

    cfg = ModelConfig(d=2, r=1.0, s=1.0)
    with pytest.raises(EstimatorUndefinedError):
        log_pred(Counts.of([0, 0]), Counts.of([1, 0]),
                 EmpiricalBayes(rule=MLE()), cfg)


def test_probabilities_never_exceed_one():
    cfg = ModelConfig(d=2, r=0.6, s=1.9)
    for x in [(0, 0), (3, 1), (0, 7)]:
        for y in [(0, 0), (1, 1), (4, 0)]:
            for fam in (Jeffreys(), FixedGamma(alpha=2.0), Shrinkage()):
                lp = log_pred(Counts.of(x), Counts.of(y), fam, cfg)
                assert lp <= 1e-12

import math

import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from poispred.errors import TruncationError
from poispred.special import (
    SeriesPolicy,
    log_gamma,
    poisson_expectation,
    poisson_log_pmf,
)

MEANS = [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 50_000.0]


def test_log_gamma_matches_reference_grid():
    z = np.concatenate([
        np.geomspace(1e-8, 0.5, 200),
        np.linspace(0.5, 50.0, 500),
        np.geomspace(50.0, 1e12, 300),
    ])
    ours = log_gamma(z)
    ref = scipy.special.gammaln(z)
    err = np.abs(ours - ref) / np.maximum(1.0, np.abs(ref))
    assert float(err.max()) < 5e-14


def test_log_gamma_scalar_and_shape():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    out = log_gamma(np.ones((2, 3)))
    assert out.shape == (2, 3)
    assert isinstance(log_gamma(2.5), float)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
def test_log_gamma_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        log_gamma(bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e8))
def test_log_gamma_recurrence(z):
    lhs = log_gamma(z + 1.0)
    rhs = log_gamma(z) + math.log(z)
    scale = max(1.0, abs(lhs), abs(math.log(z)))
    assert abs(lhs - rhs) <= 1e-12 * scale


@pytest.mark.parametrize("m", [0.05, 1.0, 7.5, 300.0])
def test_poisson_log_pmf_matches_reference(m):
    k = np.arange(0, 40)
    ours = poisson_log_pmf(k, m)
    ref = scipy.stats.poisson.logpmf(k, m)
    assert np.max(np.abs(ours - ref)) < 1e-11


@pytest.mark.parametrize("m", MEANS)
def test_expectation_normalization_and_moments(m):
    one, e1 = poisson_expectation(lambda x: np.ones_like(x), m, SeriesPolicy())
    assert abs(one - 1.0) <= max(e1, 1e-12)

    mean, e2 = poisson_expectation(lambda x: x, m, SeriesPolicy(growth_bound=(1.0, 0.0, 1.0)))
    assert abs(mean - m) <= max(e2, 1e-10 * m)

    # factorial second moment: E[x(x-1)] = m^2
    fm, e3 = poisson_expectation(
        lambda x: x * (x - 1.0), m, SeriesPolicy(growth_bound=(1.0, 0.0, 1.0))
    )
    assert abs(fm - m * m) <= max(10.0 * e3, 1e-9 * m * m)


@pytest.mark.parametrize("m", MEANS)
def test_expectation_inverse_shift_identity(m):
    # E[m/(x+1)] = 1 - exp(-m), exact for every m
    val, err = poisson_expectation(lambda x: m / (x + 1.0), m, SeriesPolicy(growth_bound=(m, 0.0)))
    exact = -math.expm1(-m)
    assert abs(val - exact) <= max(err, 1e-12)


@pytest.mark.parametrize("m", [0.3, 2.0, 25.0, 400.0])
def test_expectation_log_gamma_against_direct_sum(m):
    # independent route: raw scipy pmf times gammaln, summed far past the mass
    policy = SeriesPolicy(growth_bound=(0.58, 0.0, 1.0))
    val, err = poisson_expectation(lambda z: log_gamma(z + 0.5), m, policy)
    hi = int(m + 40.0 * math.sqrt(m + 1.0) + 60.0)
    k = np.arange(0, hi + 1)
    ref = float(np.sum(scipy.stats.poisson.pmf(k, m) * scipy.special.gammaln(k + 0.5)))
    assert abs(val - ref) <= max(20.0 * err, 5e-11 * max(1.0, abs(ref)))


def test_truncation_stable_under_tighter_tolerance():
    # tightening tail_tol tenfold must never move the value by more than the
    # previously reported bound, and must never loosen the bound; the default
    # window already overshoots moderate tolerances, so equality is allowed
    m = 40.0
    vals = []
    errs = []
    for tol in (1e-6, 1e-9, 1e-12):
        v, e = poisson_expectation(
            lambda x: np.log(x + 0.5), m, SeriesPolicy(tail_tol=tol, growth_bound=(1.0, 1.0))
        )
        vals.append(v)
        errs.append(e)
    assert errs[0] >= errs[1] >= errs[2] > 0.0
    assert abs(vals[1] - vals[0]) <= errs[0]
    assert abs(vals[2] - vals[1]) <= errs[1]
    assert errs[2] < 1e-10


def test_truncation_error_carries_partial():
    with pytest.raises(TruncationError) as excinfo:
        poisson_expectation(
            lambda x: x, 1e6, SeriesPolicy(max_terms=50, growth_bound=(1.0, 0.0, 1.0))
        )
    exc = excinfo.value
    assert math.isfinite(exc.partial)
    assert exc.err_bound > 0.0


def test_growth_bound_pair_equals_triple():
    a = SeriesPolicy(growth_bound=(2.0, 3.0))
    b = SeriesPolicy(growth_bound=(2.0, 3.0, 0.0))
    assert a.growth_bound == b.growth_bound


@pytest.mark.parametrize("kwargs", [
    {"tail_tol": 0.0},
    {"tail_tol": -1e-9},
    {"max_terms": 0},
    {"growth_bound": (-1.0, 0.0)},
    {"growth_bound": (1.0,)},
])
def test_policy_validation(kwargs):
    with pytest.raises(ValueError):
        SeriesPolicy(**kwargs)


def test_scalar_fallback_for_nonvector_h():
    # h that only works on scalars must still be usable
    def h(x):
        if hasattr(x, "__len__"):
            raise TypeError("scalar only")
        return math.log(x + 0.5)

    v_scalar, _ = poisson_expectation(h, 3.0, SeriesPolicy(growth_bound=(1.0, 1.0)))
    v_vec, _ = poisson_expectation(
        lambda x: np.log(x + 0.5), 3.0, SeriesPolicy(growth_bound=(1.0, 1.0))
    )
    assert v_scalar == pytest.approx(v_vec, abs=1e-15)

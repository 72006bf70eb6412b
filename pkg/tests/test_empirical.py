from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from storeshare.coalition import Coalition
from storeshare.empirical import (
    DailyPeakSeries,
    EmpiricalDistribution,
    JointSample,
    aggregate,
    cdf,
    conditional_mean_given_aggregate,
    correlation_matrix,
    quantile,
)
from storeshare.errors import (
    DegenerateVariance,
    EmptyCoalition,
    EmptyConditioningEvent,
    EmptyDistribution,
    ValidationError,
)

D = EmpiricalDistribution.from_values([1, 2, 3, 4])


def test_cdf_examples():
    assert cdf(D, 2) == F(1, 2)
    assert cdf(D, 0.5) == 0
    assert cdf(D, 4) == 1
    assert cdf(D, 100) == 1


def test_cdf_right_continuous_with_ties():
    d = EmpiricalDistribution.from_values([1, 2, 2, 2, 5])
    assert d.cdf(2) == F(4, 5)
    assert d.cdf(1.9999) == F(1, 5)
    assert d.jump_fx(20_000) == F(3, 5)


def test_quantile_examples():
    assert quantile(D, F(1, 2)) == 2
    assert quantile(D, 1) == 4
    assert quantile(D, 0) == 0
    assert quantile(D, F(20, 35)) == 3


def test_quantile_range_checked():
    with pytest.raises(ValueError):
        D.quantile(F(11, 10))


def test_empty_distribution():
    with pytest.raises(EmptyDistribution):
        EmpiricalDistribution.from_values([])


sample = st.lists(st.integers(0, 500_000), min_size=1, max_size=50)
level = st.fractions(min_value=0, max_value=1).filter(lambda g: g > 0)


@given(sample, level)
def test_quantile_is_generalized_inverse(xs, g):
    d = EmpiricalDistribution(xs)
    q = d.quantile_fx(g)
    assert d.cdf_fx(q) >= g
    below = [v for v in set(xs) if v < q]
    assert all(d.cdf_fx(v) < g for v in below)
    assert q in xs


@given(sample)
def test_cdf_is_a_distribution_function(xs):
    d = EmpiricalDistribution(xs)
    pts = sorted(set(xs))
    vals = [d.cdf_fx(p) for p in pts]
    assert vals == sorted(vals)
    assert vals[-1] == 1
    assert d.cdf_fx(min(xs) - 1) == 0


def test_conditional_mean_examples():
    j = JointSample.from_values([[1, 9], [2, 18], [3, 27], [4, 36]])
    assert conditional_mean_given_aggregate(j, 0, 25) == F(7, 2)
    assert conditional_mean_given_aggregate(j, 0, 10) == F(5, 2)
    with pytest.raises(EmptyConditioningEvent):
        conditional_mean_given_aggregate(j, 0, 41)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 90_000), st.integers(0, 90_000), st.integers(0, 90_000)),
                min_size=1, max_size=40),
       st.integers(0, 270_000))
def test_law_of_total_expectation(rows, t):
    j = JointSample(np.array(rows, dtype=np.int64))
    agg = j.aggregate_fx()
    n = len(rows)
    hi = agg >= t
    p_hi = F(int(hi.sum()), n)
    for i in range(3):
        mean = j.column_mean(i)
        parts = F(0)
        if p_hi:
            parts += p_hi * conditional_mean_given_aggregate(j, i, F(t, 10_000))
        if p_hi < 1:
            lo_mean = F(int(j.values_fx[~hi, i].sum()), int((~hi).sum()) * 10_000)
            parts += (1 - p_hi) * lo_mean
        assert parts == mean


def test_aggregate_examples():
    j = JointSample.from_values([[1, 2], [3, 4]])
    assert list(aggregate(j, [0, 1]).sorted_support) == [3, 7]
    assert np.array_equal(aggregate(j, [1]).sorted_fx, j.marginal(1).sorted_fx)
    j3 = JointSample.from_values([[1, 2, 5], [3, 4, 5]])
    assert list(aggregate(j3, [0, 2]).sorted_support) == [6, 8]


def test_aggregate_rejects_empty_coalition():
    with pytest.raises(EmptyCoalition):
        aggregate(JointSample.from_values([[1, 2]]), Coalition(0))


@given(st.lists(st.tuples(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6)),
                min_size=1, max_size=30))
def test_aggregate_mean_is_additive(rows):
    j = JointSample(np.array(rows, dtype=np.int64))
    for mask in range(1, 8):
        s = Coalition(mask)
        assert aggregate(j, s).mean() == sum(j.column_mean(i) for i in s)


def test_correlation_examples():
    rng = np.random.default_rng(0)
    a = rng.gamma(2, 3, 50).round(4)
    b = rng.gamma(2, 3, 50).round(4)
    s = DailyPeakSeries.from_values(np.column_stack([a, a, b]))
    r = correlation_matrix(s)
    assert r.shape == (3, 3)
    assert np.allclose(np.diag(r), 1)
    assert r[0, 1] == pytest.approx(1.0)
    assert np.allclose(r, r.T)
    assert np.all(np.abs(r) <= 1)


def test_correlation_negation_around_mean():
    a = np.array([1.0, 2.0, 3.0, 5.0, 9.0])
    s = DailyPeakSeries.from_values(np.column_stack([a, 10 - a]))
    assert correlation_matrix(s)[0, 1] == pytest.approx(-1.0)


def test_correlation_degenerate():
    s = DailyPeakSeries.from_values([[1, 2], [1, 3], [1, 4]])
    with pytest.raises(DegenerateVariance):
        correlation_matrix(s)
    with pytest.raises(DegenerateVariance):
        correlation_matrix(DailyPeakSeries.from_values([[1, 2]]))


def test_series_validation():
    with pytest.raises(ValidationError):
        DailyPeakSeries.from_values([[1, -2]])
    s = DailyPeakSeries.from_values([[1.5, 2.25], [0, 3]])
    assert s.n_days == 2 and s.n_consumers == 2
    assert s.dates[0].weekday() < 5
    with pytest.raises(ValueError):
        s.values_fx[0, 0] = 7

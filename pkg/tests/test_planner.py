from fractions import Fraction as F

import numpy as np
from hypothesis import given, settings, strategies as st

from oracles import daily_cost, expectation, outcomes_of
from storeshare.coalition import Coalition
from storeshare.costs import expected_cost, optimize_distribution
from storeshare.empirical import EmpiricalDistribution, JointSample
from storeshare.planner import grid_minimum, optimal_capacity, optimal_expected_cost, plan_capacities
from storeshare.tariff import Tariff

T = Tariff.from_prices(55, 20, 15)


def test_optimal_capacity_examples():
    assert optimal_capacity(EmpiricalDistribution.from_values([4]), T) == 4
    assert optimal_capacity(EmpiricalDistribution.from_values([4]), T, capital_cost=1) == 4
    assert optimal_capacity(EmpiricalDistribution.from_values([1, 2, 3, 4]), T) == 3
    assert optimal_capacity(EmpiricalDistribution.from_values([1, 2, 3, 4]), T, capital_cost=35) == 0


def test_quantile_rule_beats_grid_sweep():
    d = EmpiricalDistribution.from_values([1, 2, 3, 4])
    best = expected_cost(d, 3, 15, T)
    gmin, _, _ = grid_minimum(d, T)
    assert best <= gmin
    # brute force over the four outcomes
    outs = outcomes_of([1, 2, 3, 4])
    for c in np.linspace(0, 4, 1000):
        c = F(round(float(c), 4))
        assert best <= expectation(outs, lambda x: daily_cost(x, c, 15, 55, 20))


def test_optimal_expected_cost_examples():
    assert optimal_expected_cost(EmpiricalDistribution.from_values([4, 4, 4, 4]), T) == 140
    t0 = Tariff.from_prices(55, 20, 35)
    d = EmpiricalDistribution.from_values([1, 2, 6])
    assert optimal_expected_cost(d, t0) == 55 * 3


def test_two_point_closed_form_matches_direct():
    d = EmpiricalDistribution.from_values([0, 10])
    opt = optimize_distribution(d, T)
    assert opt.capacity == 10
    direct = expectation(outcomes_of([0, 10]), lambda x: daily_cost(x, 10, 15, 55, 20))
    assert opt.value == direct == opt.direct == 250


def test_joint_sample_dispatch():
    j = JointSample.from_values([[1, 2], [3, 1], [2, 2]])
    assert optimal_expected_cost(j, T, Coalition.of([0])) == optimize_distribution(j.marginal(0), T).value


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 300_000), min_size=1, max_size=25),
       st.sampled_from([F(0), F(1, 2), F(1), F(2), F(10)]))
def test_positive_homogeneity_of_optimum(xs, alpha):
    xs2 = [2 * v for v in xs]
    base = optimize_distribution(EmpiricalDistribution(xs2), T)
    scaled = optimize_distribution(EmpiricalDistribution([int(alpha * v) for v in xs2]), T)
    assert scaled.capacity == alpha * base.capacity
    assert scaled.value == alpha * base.value


@given(st.lists(st.integers(0, 300_000), min_size=1, max_size=25),
       st.sampled_from([1, 2, 3, 10]),
       st.fractions(min_value=0, max_value=1))
def test_quantile_scales(xs, alpha, g):
    d = EmpiricalDistribution(xs)
    assert EmpiricalDistribution([alpha * v for v in xs]).quantile(g) == alpha * d.quantile(g)


def test_plan_invariants():
    rng = np.random.default_rng(11)
    j = JointSample.from_values(rng.lognormal(2.5, 0.4, size=(200, 4)).round(4))
    plan = plan_capacities(j, T)
    tol = sum(o.epsilon for o in plan.individual) + plan.grand.epsilon
    assert plan.coalition_Jstar <= sum(plan.per_consumer_Jstar) + tol
    for o in plan.individual + (plan.grand,):
        assert o.value >= F(20) * o.mean
    assert plan.gamma_used == F(4, 7)
    assert not plan.no_storage

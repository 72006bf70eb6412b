"""Closed-form cost allocations, realized daily splits, and benefit of cooperation."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coalition import Coalition
from .costs import CapacityProfile, coalition_realized_cost_fx
from .empirical import JointSample, conditional_mean_fx
from .errors import DimensionMismatch, EmptyHistory, ValidationError, ZeroTotalExpectedCost
from .fixedpoint import from_fixed, money, to_fixed
from .planner import CapacityPlan
from .tariff import Tariff

SCENARIO_I = "I"
SCENARIO_II_EXPECTED = "II-expected"
SCENARIO_II_REALIZED = "II-realized"


@dataclass(frozen=True)
class AllocationResult:
    """Cost shares (cents) for each consumer.

    ``total`` is the cost being shared; ``sum(shares) == total`` exactly.
    ``beta`` holds the proportional weights of a realized Scenario II split.
    """

    shares: tuple[Fraction, ...]
    scenario: str
    total: Fraction
    day: int | dt.date | None = None
    beta: tuple[Fraction, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.shares)

    def is_budget_balanced(self) -> bool:
        return sum(self.shares, Fraction(0)) == self.total


@dataclass(frozen=True)
class BenefitReport:
    """Cost reduction from cooperating, in total and per consumer (cents)."""

    total_benefit: Fraction
    per_consumer_benefit: tuple[Fraction, ...]
    scenario: str


def _realized_inputs(x, caps: CapacityProfile, t: Tariff):
    x_fx = [to_fixed(v) for v in x]
    if len(x_fx) != caps.n:
        raise DimensionMismatch(f"{len(x_fx)} consumptions but {caps.n} capacities")
    if any(v < 0 for v in x_fx):
        raise ValidationError("consumption must be nonnegative")
    return x_fx, caps.capacities_fx, t.capital_costs_fx(caps.n)


def scenario1_shares_fx(x_fx, c_fx, capital_fx, pi_h_fx, pi_l_fx) -> list[int]:
    """Allocation of one day's pooled cost, money fixed point.

    When the pool is saturated (ties included) each consumer pays peak price
    on its own surplus over its capacity, which is negative for consumers
    with spare room; otherwise everyone's peak use is covered off-peak.
    """
    if sum(x_fx) >= sum(c_fx):
        return [k * c + pi_h_fx * (x - c) + pi_l_fx * c
                for x, c, k in zip(x_fx, c_fx, capital_fx)]
    return [k * c + pi_l_fx * x for x, c, k in zip(x_fx, c_fx, capital_fx)]


def allocation_scenario1(x, caps: CapacityProfile, t: Tariff, day=None) -> AllocationResult:
    """Split the grand coalition's realized cost of pooled, already-owned storage."""
    x_fx, c_fx, capital = _realized_inputs(x, caps, t)
    shares = scenario1_shares_fx(x_fx, c_fx, capital, t.pi_h_fx, t.pi_l_fx)
    total = coalition_realized_cost_fx(Coalition.grand(caps.n).mask, x_fx, c_fx, capital,
                                       t.pi_h_fx, t.pi_l_fx)
    return AllocationResult(tuple(money(s) for s in shares), SCENARIO_I, money(total), day)


def allocation_scenario2_expected(j: JointSample, plan: CapacityPlan, t: Tariff) -> AllocationResult:
    """Expected-cost shares: pi_l E[x_i] + pi_S E[x_i | x_N >= C*_N].

    Raises EmptyConditioningEvent if no day reaches the grand capacity.
    """
    if plan.n != j.n_consumers:
        raise DimensionMismatch(f"plan covers {plan.n} consumers, sample has {j.n_consumers}")
    c_fx = plan.grand.capacity_fx
    pi_l = from_fixed(t.pi_l_fx)
    pi_s = from_fixed(t.pi_shared_fx)
    shares = tuple(pi_l * j.column_mean(i) + pi_s * conditional_mean_fx(j, i, c_fx)
                   for i in range(j.n_consumers))
    return AllocationResult(shares, SCENARIO_II_EXPECTED, sum(shares, Fraction(0)))


def allocation_scenario2_realized(zeta: Sequence, realized_day_cost, day=None) -> AllocationResult:
    """Split one day's realized grand-coalition cost in proportion to ``zeta``."""
    z = [Fraction(v) for v in zeta]
    total_z = sum(z, Fraction(0))
    if total_z <= 0:
        raise ZeroTotalExpectedCost("expected-cost shares must have a positive sum")
    beta = tuple(v / total_z for v in z)
    cost = Fraction(realized_day_cost)
    return AllocationResult(tuple(b * cost for b in beta), SCENARIO_II_REALIZED, cost, day, beta)


def average_realized_allocation(history: Sequence[AllocationResult]) -> tuple[Fraction, ...]:
    if not history:
        raise EmptyHistory("no allocations to average")
    n = history[0].n
    if any(a.n != n for a in history):
        raise DimensionMismatch("allocations in history have different dimensions")
    d = len(history)
    return tuple(sum((a.shares[i] for a in history), Fraction(0)) / d for i in range(n))


def running_averages(history: Sequence[AllocationResult]) -> list[tuple[Fraction, ...]]:
    """Average allocation after each of the first D days, for D = 1..len(history)."""
    out = []
    if not history:
        return out
    acc = [Fraction(0)] * history[0].n
    for d, a in enumerate(history, start=1):
        acc = [s + v for s, v in zip(acc, a.shares)]
        out.append(tuple(s / d for s in acc))
    return out


def benefit_scenario1(x, caps: CapacityProfile, t: Tariff) -> BenefitReport:
    """Saving from pooling installed storage on one realized day.

    Total: pi_h * (sum (x_i - C_i)^+ - (x_N - C_N)^+) + pi_l * (sum min(C_i, x_i) - min(C_N, x_N)).
    Per consumer (under the pooled allocation): pi_delta * (C_i - x_i)^+ if
    the pool is saturated, else pi_delta * (x_i - C_i)^+.
    """
    x_fx, c_fx, _ = _realized_inputs(x, caps, t)
    xn, cn = sum(x_fx), sum(c_fx)
    over = sum(max(x - c, 0) for x, c in zip(x_fx, c_fx)) - max(xn - cn, 0)
    stored = sum(min(c, x) for x, c in zip(x_fx, c_fx)) - min(cn, xn)
    total = t.pi_h_fx * over + t.pi_l_fx * stored
    delta = t.pi_delta_fx
    if xn >= cn:
        per = [delta * max(c - x, 0) for x, c in zip(x_fx, c_fx)]
    else:
        per = [delta * max(x - c, 0) for x, c in zip(x_fx, c_fx)]
    return BenefitReport(money(total), tuple(money(p) for p in per), SCENARIO_I)


def benefit_scenario2(j: JointSample, plan: CapacityPlan, zeta, t: Tariff) -> BenefitReport:
    """Reduction in expected cost from joint sizing.

    Total: pi_S * (sum E[x_i | x_i >= C*_i] - E[x_N | x_N >= C*_N]).
    Per consumer: pi_S * (E[x_i | x_i >= C*_i] - E[x_i | x_N >= C*_N]).

    ``zeta`` only fixes the dimension here; the per-consumer figures come
    from the conditional means, independently of how ``zeta`` was computed.
    """
    n = j.n_consumers
    if plan.n != n or len(zeta) != n:
        raise DimensionMismatch("plan, sample and allocation must cover the same consumers")
    pi_s = from_fixed(t.pi_shared_fx)
    cn = plan.grand.capacity_fx
    total = pi_s * (sum((o.tail_mean for o in plan.individual), Fraction(0)) - plan.grand.tail_mean)
    per = tuple(pi_s * (plan.individual[i].tail_mean - conditional_mean_fx(j, i, cn))
                for i in range(n))
    return BenefitReport(total, per, SCENARIO_II_EXPECTED)

"""Optimal storage sizing for individuals and coalitions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coalition import Coalition
from .costs import CoalitionOptimum, expected_cost_fx, optimize_coalition, optimize_distribution
from .empirical import EmpiricalDistribution, JointSample
from .fixedpoint import SCALE, from_fixed, to_fixed
from .tariff import Tariff


def optimal_capacity(d: EmpiricalDistribution, t: Tariff, capital_cost=None) -> Fraction:
    """Capacity minimizing expected daily cost: the critical-fractile quantile of ``d``."""
    cap_fx = t.pi_shared_fx if capital_cost is None else to_fixed(capital_cost)
    return optimize_distribution(d, t, cap_fx).capacity


def optimal_expected_cost(d, t: Tariff, s=None) -> Fraction:
    """Minimal expected daily cost.

    ``d`` is either an :class:`EmpiricalDistribution` or a
    :class:`JointSample`; in the latter case the coalition ``s`` (default:
    everyone) is aggregated first.
    """
    if isinstance(d, JointSample):
        s = Coalition.grand(d.n_consumers) if s is None else s
        return optimize_coalition(s, d, t).value
    return optimize_distribution(d, t).value


def grid_minimum(d: EmpiricalDistribution, t: Tariff, capital_cost=None, points: int = 1000):
    """Brute-force minimum of the expected cost over an even grid on ``[0, max x]``.

    Returns ``(min_cost, argmin_kWh, grid_step_kWh)``.  Grid points are
    rounded to the fixed-point lattice, so the step is approximate to 1e-4.
    """
    cap_fx = t.pi_shared_fx if capital_cost is None else to_fixed(capital_cost)
    grid = np.unique(np.rint(np.linspace(0, d.max_fx, points)).astype(np.int64))
    best = None
    best_c = 0
    x = d.sorted_fx
    for c in grid:
        cost = expected_cost_fx(x, int(c), cap_fx, t)
        if best is None or cost < best:
            best, best_c = cost, int(c)
    step = Fraction(d.max_fx, (points - 1) * SCALE) if points > 1 else Fraction(d.max_fx, SCALE)
    return best, from_fixed(best_c), step


@dataclass(frozen=True)
class CapacityPlan:
    """Optimal capacities and costs for every consumer alone and for the grand coalition."""

    individual: tuple[CoalitionOptimum, ...]
    grand: CoalitionOptimum
    gamma_used: Fraction

    @property
    def per_consumer_Cstar(self) -> tuple[Fraction, ...]:
        return tuple(o.capacity for o in self.individual)

    @property
    def per_consumer_Jstar(self) -> tuple[Fraction, ...]:
        return tuple(o.value for o in self.individual)

    @property
    def coalition_Cstar(self) -> Fraction:
        return self.grand.capacity

    @property
    def coalition_Jstar(self) -> Fraction:
        return self.grand.value

    @property
    def n(self) -> int:
        return len(self.individual)

    @property
    def no_storage(self) -> bool:
        return self.gamma_used == 0


def plan_capacities(joint: JointSample, t: Tariff) -> CapacityPlan:
    n = joint.n_consumers
    individual = tuple(optimize_coalition(Coalition.of([i]), joint, t) for i in range(n))
    grand = optimize_coalition(Coalition.grand(n), joint, t)
    return CapacityPlan(individual, grand, grand.gamma)

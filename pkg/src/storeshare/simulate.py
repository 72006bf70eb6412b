"""Day-by-day simulation of realized cost sharing."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .allocation import AllocationResult, allocation_scenario2_realized, scenario1_shares_fx, SCENARIO_I
from .costs import realized_cost_fx
from .empirical import JointSample
from .fixedpoint import MONEY_SCALE, money
from .planner import CapacityPlan
from .tariff import Tariff


@dataclass
class SimulationResult:
    """Per-day allocations for both sharing rules plus their running averages.

    ``day_index[k]`` is the historical day resampled on simulated day ``k``.
    Running averages are exact: entry ``D-1`` averages days ``1..D``.
    """

    day_index: np.ndarray
    grand_cost_ii: list[Fraction]
    rho: list[AllocationResult]
    grand_cost_i: list[Fraction]
    xi: list[AllocationResult]
    rho_running: np.ndarray
    xi_running: np.ndarray
    zeta: tuple[Fraction, ...]

    @property
    def days(self) -> int:
        return len(self.day_index)

    def rho_average(self) -> tuple[Fraction, ...]:
        if not self.rho:
            return ()
        beta = self.rho[0].beta
        mean_cost = sum(self.grand_cost_ii, Fraction(0)) / self.days
        return tuple(b * mean_cost for b in beta)

    def lln_errors(self, checkpoints=(10, 100, 1000, 10_000)) -> dict[int, float]:
        """max_i |running average of rho_i - zeta_i| / zeta_i at each checkpoint."""
        z = np.array([float(v) for v in self.zeta])
        out = {}
        for d in checkpoints:
            if d <= self.days:
                out[d] = float(np.max(np.abs(self.rho_running[d - 1] - z) / z))
        return out


def simulate_days(joint: JointSample, plan: CapacityPlan, zeta, t: Tariff, days: int,
                  rng: np.random.Generator) -> SimulationResult:
    """Resample ``days`` historical days i.i.d. and split each day's realized cost.

    Scenario II: the grand coalition runs the jointly sized capacity ``C*_N``
    at the shared capital cost and splits its realized cost in proportion to
    ``zeta``.  Scenario I: each consumer owns its individually optimal
    capacity ``C*_i``; the pool's realized cost is split by the pooled rule.
    """
    n = joint.n_consumers
    idx = rng.integers(0, joint.n_days, size=days) if days > 0 else np.zeros(0, dtype=np.int64)
    x = joint.values_fx[idx]
    xn = x.sum(axis=1)
    cost2_fx = realized_cost_fx(xn, plan.grand.capacity_fx, t.pi_shared_fx, t.pi_h_fx, t.pi_l_fx)
    grand_cost_ii = [money(int(c)) for c in cost2_fx]
    rho = [allocation_scenario2_realized(zeta, c, day=k) for k, c in enumerate(grand_cost_ii)]

    c_fx = [o.capacity_fx for o in plan.individual]
    capital = t.capital_costs_fx(n)
    xi_fx = np.array([scenario1_shares_fx([int(v) for v in row], c_fx, capital, t.pi_h_fx, t.pi_l_fx)
                      for row in x], dtype=np.int64).reshape(days, n)
    grand_cost_i = [money(int(v)) for v in xi_fx.sum(axis=1)]
    xi = [AllocationResult(tuple(money(int(v)) for v in row), SCENARIO_I, total, k)
          for k, (row, total) in enumerate(zip(xi_fx, grand_cost_i))]

    d = np.arange(1, days + 1, dtype=np.float64)[:, None]
    beta = np.array([float(b) for b in rho[0].beta]) if rho else np.zeros(n)
    rho_running = (np.cumsum(cost2_fx).astype(np.float64)[:, None] / MONEY_SCALE / d) * beta[None, :]
    xi_running = np.cumsum(xi_fx, axis=0).astype(np.float64) / MONEY_SCALE / d
    return SimulationResult(idx, grand_cost_ii, rho, grand_cost_i, xi, rho_running, xi_running,
                            tuple(Fraction(z) for z in zeta))

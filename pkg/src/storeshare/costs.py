"""Daily storage cost functions and the two coalition value functions.

``u`` is the realized cost of pooling already-installed capacity on one
day; ``v`` is the minimal expected daily cost of jointly sized storage.
Money is in cents.  The ``*_fx`` kernels take fixed-point integers (or
int64 arrays) and return money scaled by ``MONEY_SCALE``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .coalition import Coalition, as_coalition
from .empirical import EmpiricalDistribution, JointSample
from .errors import DegenerateDistribution, DimensionMismatch, EmptyCoalition, EmptyDistribution, ValidationError
from .fixedpoint import MONEY_SCALE, SCALE, from_fixed, money, to_fixed
from .tariff import Tariff, arbitrage_constant_fx


def realized_cost_fx(x_fx, c_fx, capital_fx, pi_h_fx, pi_l_fx):
    """Fixed-point daily cost; works elementwise on int64 arrays."""
    if isinstance(x_fx, np.ndarray) or isinstance(c_fx, np.ndarray):
        over = np.maximum(x_fx - c_fx, 0)
        stored = np.minimum(c_fx, x_fx)
    else:
        over = max(x_fx - c_fx, 0)
        stored = min(c_fx, x_fx)
    return capital_fx * c_fx + pi_h_fx * over + pi_l_fx * stored


def realized_cost(x, capacity, capital_cost, t: Tariff) -> Fraction:
    """Daily cost of serving peak consumption ``x`` with ``capacity`` kWh of storage.

    capital_cost * C + pi_h * (x - C)^+ + pi_l * min(C, x), in cents.
    """
    x_fx, c_fx = to_fixed(x), to_fixed(capacity)
    if x_fx < 0 or c_fx < 0:
        raise ValidationError("consumption and capacity must be nonnegative")
    return money(realized_cost_fx(x_fx, c_fx, to_fixed(capital_cost), t.pi_h_fx, t.pi_l_fx))


@dataclass(frozen=True)
class CapacityProfile:
    """Installed storage per consumer (kWh, fixed point)."""

    capacities_fx: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.capacities_fx):
            raise ValidationError("capacities must be nonnegative")

    @classmethod
    def of(cls, capacities: Sequence) -> "CapacityProfile":
        return cls(tuple(to_fixed(c) for c in capacities))

    @property
    def n(self) -> int:
        return len(self.capacities_fx)

    @property
    def capacities(self) -> tuple[Fraction, ...]:
        return tuple(from_fixed(c) for c in self.capacities_fx)

    def total_fx(self, s: Coalition) -> int:
        return sum(self.capacities_fx[i] for i in s)


def _check_dims(x_fx: Sequence[int], caps: CapacityProfile, t: Tariff):
    if len(x_fx) != caps.n:
        raise DimensionMismatch(f"{len(x_fx)} consumptions but {caps.n} capacities")
    return t.capital_costs_fx(caps.n)


def coalition_realized_cost_fx(mask: int, x_fx: Sequence[int], caps_fx: Sequence[int],
                               capital_fx: Sequence[int], pi_h_fx: int, pi_l_fx: int) -> int:
    """u(S) in money fixed point, for a bitmask ``mask``."""
    xs = cs = cap_cost = 0
    i = 0
    m = mask
    while m:
        if m & 1:
            xs += x_fx[i]
            cs += caps_fx[i]
            cap_cost += capital_fx[i] * caps_fx[i]
        m >>= 1
        i += 1
    return cap_cost + pi_h_fx * max(xs - cs, 0) + pi_l_fx * min(cs, xs)


def coalition_realized_cost_u(s, x, caps: CapacityProfile, t: Tariff) -> Fraction:
    """Realized daily cost of coalition ``s`` pooling its members' installed storage.

    Each member pays its own capital cost; the pooled capacity serves the
    pooled peak consumption.
    """
    x_fx = [to_fixed(v) for v in x]
    capital = _check_dims(x_fx, caps, t)
    if any(v < 0 for v in x_fx):
        raise ValidationError("consumption must be nonnegative")
    c = as_coalition(s)
    if c.mask == 0:
        raise EmptyCoalition("u is defined for nonempty coalitions only")
    c.require_within(caps.n)
    return money(coalition_realized_cost_fx(c.mask, x_fx, caps.capacities_fx, capital,
                                            t.pi_h_fx, t.pi_l_fx))


def expected_cost_fx(sample_fx: np.ndarray, c_fx: int, capital_fx: int, t: Tariff) -> Fraction:
    n = len(sample_fx)
    if n == 0:
        raise EmptyDistribution("expected cost of an empty sample")
    total = int(realized_cost_fx(np.asarray(sample_fx, dtype=np.int64), c_fx, capital_fx,
                                 t.pi_h_fx, t.pi_l_fx).sum())
    return Fraction(total, n * MONEY_SCALE)


def expected_cost(dist: EmpiricalDistribution, capacity, capital_cost, t: Tariff) -> Fraction:
    """Mean realized cost over the empirical distribution, at fixed ``capacity``."""
    return expected_cost_fx(dist.sorted_fx, to_fixed(capacity), to_fixed(capital_cost), t)


@dataclass(frozen=True)
class CoalitionOptimum:
    """Result of sizing storage for one coalition under the empirical measure.

    ``value`` is the closed form ``pi_l E[x] + pi_S E[x | x >= C*]`` and is
    what the game uses; ``direct`` is the expected cost evaluated at
    ``C*``.  The two coincide when the CDF hits ``gamma`` exactly; otherwise
    they differ by at most ``epsilon``.
    """

    capacity_fx: int
    value: Fraction
    direct: Fraction
    gamma: Fraction
    jump: Fraction
    epsilon: Fraction
    mean: Fraction
    tail_mean: Fraction
    regime: str

    @property
    def capacity(self) -> Fraction:
        return from_fixed(self.capacity_fx)


def quantile_gap(t: Tariff, dist: EmpiricalDistribution, c_fx: int) -> Fraction:
    """Discretization slack at capacity ``c``: pi_delta * P(x = c) * (max x - c)."""
    return from_fixed(t.pi_delta_fx) * dist.jump_fx(c_fx) * Fraction(dist.max_fx - c_fx, SCALE)


def optimize_distribution(dist: EmpiricalDistribution, t: Tariff, capital_fx: int | None = None) -> CoalitionOptimum:
    """Size storage by the critical-fractile rule and evaluate the optimal expected cost."""
    cap = t.pi_shared_fx if capital_fx is None else capital_fx
    gamma = arbitrage_constant_fx(t, cap)
    c_fx = dist.quantile_fx(gamma)
    mean = dist.mean()
    tail = dist.tail_mean_fx(c_fx)
    value = from_fixed(t.pi_l_fx) * mean + from_fixed(cap) * tail
    direct = expected_cost_fx(dist.sorted_fx, c_fx, cap, t)
    if gamma == 0:
        regime = "no-storage"
    elif c_fx == dist.max_fx:
        regime = "full-coverage"
    else:
        regime = "interior"
    return CoalitionOptimum(c_fx, value, direct, gamma, dist.jump_fx(c_fx),
                            quantile_gap(t, dist, c_fx), mean, tail, regime)


def optimize_coalition(s, joint: JointSample, t: Tariff) -> CoalitionOptimum:
    c = as_coalition(s)
    if c.mask == 0:
        raise EmptyCoalition("v is defined for nonempty coalitions only")
    agg = joint.aggregate_fx(c)
    if agg.size == 0:
        raise DegenerateDistribution("aggregate sample is empty")
    return optimize_distribution(EmpiricalDistribution(agg), t)


def coalition_expected_value_v(s, joint: JointSample, t: Tariff) -> tuple[Fraction, Fraction]:
    """``(v(S), C*_S)``: minimal expected daily cost of coalition ``s`` and its capacity."""
    opt = optimize_coalition(s, joint, t)
    return opt.value, opt.capacity

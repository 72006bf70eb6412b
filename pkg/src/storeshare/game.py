"""Verification harness: materialize the cost games and check their guarantees.

Scenario I values are integers in money fixed point, so the checks run
vectorized over int64 arrays with exact comparisons.  Scenario II values are
exact fractions with a per-coalition discretization tolerance.

Every coalition evaluation is independent.  Functions that evaluate many
coalitions take a ``map_fn`` (default: builtin ``map``) so callers can plug
in a process or thread pool; results are always aggregated in mask order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .allocation import (
    AllocationResult,
    allocation_scenario1,
    allocation_scenario2_expected,
    scenario1_shares_fx,
)
from .coalition import Coalition, count_disjoint_pairs, disjoint_pairs, members_of
from .costs import CapacityProfile, optimize_coalition
from .empirical import JointSample
from .errors import DimensionMismatch, TooManyPlayers, ValidationError
from .fixedpoint import MONEY_SCALE, from_fixed, money, to_fixed
from .planner import plan_capacities
from .tariff import Tariff

SCENARIO_I = "ScenarioI"
SCENARIO_II = "ScenarioII"

MAX_PLAYERS = 20
EXHAUSTIVE_CAP = {SCENARIO_I: 16, SCENARIO_II: 10}
SAMPLED_COALITIONS = 10_000


class GameInstance:
    """A cost game ``(N, value)`` with values evaluated on demand and cached.

    ``tolerance(mask)`` is the discretization slack allowed for that
    coalition (zero for Scenario I).
    """

    def __init__(self, n: int, label: str, evaluator: Callable[[int], tuple[Fraction, Fraction]],
                 int_values: np.ndarray | None = None, context: dict | None = None):
        self.n = n
        self.label = label
        self._evaluator = evaluator
        self._values: dict[int, Fraction] = {}
        self._tolerance: dict[int, Fraction] = {}
        self.int_values = int_values
        self.context = context or {}

    @property
    def grand_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def exhaustive(self) -> bool:
        return self.n <= EXHAUSTIVE_CAP[self.label]

    def _ensure(self, mask: int):
        if mask not in self._values:
            v, tol = self._evaluator(mask)
            self._values[mask] = v
            self._tolerance[mask] = tol

    def value(self, mask: int) -> Fraction:
        if mask == 0:
            return Fraction(0)
        self._ensure(mask)
        return self._values[mask]

    def tolerance(self, mask: int) -> Fraction:
        if mask == 0:
            return Fraction(0)
        self._ensure(mask)
        return self._tolerance[mask]

    def evaluate(self, masks: Sequence[int], map_fn=map):
        todo = sorted({m for m in masks if m and m not in self._values})
        for m, (v, tol) in zip(todo, map_fn(self._evaluator, todo)):
            self._values[m] = v
            self._tolerance[m] = tol

    def materialize(self, map_fn=map) -> "GameInstance":
        self.evaluate(range(1, 1 << self.n), map_fn)
        return self

    @property
    def value_fn(self) -> dict[int, Fraction]:
        return {m: self._values[m] for m in sorted(self._values)}

    def __repr__(self):
        return f"GameInstance(n={self.n}, label={self.label}, evaluated={len(self._values)})"


def _mask_sums(n: int, per_player: Sequence[int]) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for i, v in enumerate(per_player):
        out += ((masks >> i) & 1) * np.int64(v)
    return out


def scenario1_values_fx(x_fx, c_fx, capital_fx, t: Tariff) -> np.ndarray:
    """u(S) for every mask S (index 0 is the empty coalition, value 0)."""
    n = len(x_fx)
    xs = _mask_sums(n, x_fx)
    cs = _mask_sums(n, c_fx)
    cap = _mask_sums(n, [k * c for k, c in zip(capital_fx, c_fx)])
    return cap + t.pi_h_fx * np.maximum(xs - cs, 0) + t.pi_l_fx * np.minimum(cs, xs)


def scenario1_predicted_slack_fx(x_fx, c_fx, t: Tariff) -> np.ndarray:
    """Core slack of the pooled allocation for every mask, from its closed form."""
    n = len(x_fx)
    xs = _mask_sums(n, x_fx)
    cs = _mask_sums(n, c_fx)
    if sum(x_fx) >= sum(c_fx):
        gap = np.maximum(cs - xs, 0)
    else:
        gap = np.maximum(xs - cs, 0)
    out = t.pi_delta_fx * gap
    out[0] = 0
    return out


def materialize_game(scenario: str, t: Tariff, *, x=None, caps: CapacityProfile | None = None,
                     joint: JointSample | None = None, map_fn=map, lazy: bool | None = None) -> GameInstance:
    """Build the Scenario I game (from one day's ``x`` and installed ``caps``)
    or the Scenario II game (from a day-aligned ``joint`` sample).

    Games within the exhaustive cap are fully evaluated; larger games stay
    lazy and are evaluated only on sampled coalitions.
    """
    if scenario in ("1", "I", SCENARIO_I):
        if x is None or caps is None:
            raise ValidationError("Scenario I needs realized consumption and capacities")
        x_fx = [to_fixed(v) for v in x]
        if len(x_fx) != caps.n:
            raise DimensionMismatch(f"{len(x_fx)} consumptions but {caps.n} capacities")
        if any(v < 0 for v in x_fx):
            raise ValidationError("consumption must be nonnegative")
        n = len(x_fx)
        _check_players(n)
        capital = t.capital_costs_fx(n)
        c_fx = caps.capacities_fx
        ints = scenario1_values_fx(x_fx, c_fx, capital, t) if n <= EXHAUSTIVE_CAP[SCENARIO_I] else None

        def evaluate(mask, _x=x_fx, _c=c_fx, _k=capital):
            xs = cs = cap = 0
            for i in members_of(mask):
                xs += _x[i]
                cs += _c[i]
                cap += _k[i] * _c[i]
            return money(cap + t.pi_h_fx * max(xs - cs, 0) + t.pi_l_fx * min(cs, xs)), Fraction(0)

        g = GameInstance(n, SCENARIO_I, evaluate, ints,
                         dict(x_fx=x_fx, c_fx=c_fx, capital_fx=capital, tariff=t))
        if ints is not None:
            g._values = {m: money(int(ints[m])) for m in range(1, 1 << n)}
            g._tolerance = dict.fromkeys(g._values, Fraction(0))
        return g

    if scenario in ("2", "II", SCENARIO_II):
        if joint is None:
            raise ValidationError("Scenario II needs a joint sample")
        n = joint.n_consumers
        _check_players(n)

        def evaluate(mask, _j=joint):
            opt = optimize_coalition(Coalition(mask), _j, t)
            return opt.value, opt.epsilon

        g = GameInstance(n, SCENARIO_II, evaluate, None, dict(joint=joint, tariff=t))
        if lazy is False or (lazy is None and g.exhaustive):
            g.materialize(map_fn)
        return g
    raise ValueError(f"unknown scenario {scenario!r}")


def _check_players(n: int):
    if n < 1:
        raise ValidationError("a game needs at least one player")
    if n > MAX_PLAYERS:
        raise TooManyPlayers(f"{n} players exceeds the limit of {MAX_PLAYERS}")


@dataclass
class SubadditivityReport:
    label: str
    mode: str
    pairs_checked: int
    worst_slack: Fraction | None
    worst_pair: tuple[int, int] | None
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass
class CoreCheckReport:
    """Result of checking ``sum_{i in S} alloc_i <= value(S)`` for every coalition.

    ``slacks`` maps each checked mask to ``value(S) - alloc(S)``;
    ``violations`` lists ``(mask, lhs, rhs, slack)`` for coalitions whose
    slack is below minus their tolerance.
    """

    allocation: tuple[Fraction, ...]
    label: str
    mode: str
    budget_gap: Fraction
    tolerance: str
    slacks: dict[int, Fraction]
    violations: list
    worst_slack: Fraction | None
    worst_coalition: int | None
    max_tolerance: Fraction
    slack_mismatches: list = field(default_factory=list)

    @property
    def budget_balanced(self) -> bool:
        return self.budget_gap == 0

    @property
    def verdict(self) -> bool:
        return self.budget_balanced and not self.violations and not self.slack_mismatches

    passed = verdict


def _sample_masks(n: int, count: int, rng: np.random.Generator) -> list[int]:
    full = (1 << n) - 1
    out = set()
    while len(out) < min(count, full):
        bits = rng.integers(0, 2, size=n)
        m = int(sum(int(b) << i for i, b in enumerate(bits)))
        if m:
            out.add(m)
    return sorted(out)


def _sample_pairs(n: int, count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    pairs = set()
    target = min(count, count_disjoint_pairs(n))
    while len(pairs) < target:
        labels = rng.integers(0, 3, size=n)
        s = int(sum(1 << i for i in range(n) if labels[i] == 1))
        t = int(sum(1 << i for i in range(n) if labels[i] == 2))
        if s and t:
            pairs.add((s, t))
    return sorted(pairs)


def _submask_table(comp: int) -> np.ndarray:
    bits = [1 << i for i in members_of(comp)]
    r = np.arange(1 << len(bits), dtype=np.int64)
    out = np.zeros_like(r)
    for j, b in enumerate(bits):
        out |= ((r >> j) & 1) * b
    return out[1:]


def check_subadditivity(g: GameInstance, *, samples: int = SAMPLED_COALITIONS, seed: int = 0,
                        map_fn=map) -> SubadditivityReport:
    """Check ``value(S) + value(T) >= value(S | T)`` on disjoint nonempty pairs.

    Exhaustive within the cap, otherwise on ``samples`` seeded random pairs.
    For Scenario II each pair may fall short by the sum of the two
    coalitions' tolerances.
    """
    n = g.n
    if g.int_values is not None:
        v = g.int_values
        full = g.grand_mask
        worst = None
        worst_pair = None
        violations = []
        checked = 0
        for s in range(1, full + 1):
            comp = full ^ s
            if not comp:
                continue
            ts = _submask_table(comp)
            slack = v[s] + v[ts] - v[s | ts]
            checked += ts.size
            k = int(np.argmin(slack))
            if worst is None or slack[k] < worst:
                worst, worst_pair = int(slack[k]), (s, int(ts[k]))
            for idx in np.flatnonzero(slack < 0):
                t_ = int(ts[idx])
                violations.append((s, t_, money(int(v[s]) + int(v[t_])), money(int(v[s | t_])),
                                   money(int(slack[idx]))))
        assert checked == count_disjoint_pairs(n)
        return SubadditivityReport(g.label, "exhaustive", checked,
                                   None if worst is None else money(worst), worst_pair, violations)

    if g.exhaustive:
        g.materialize(map_fn)
        pairs = disjoint_pairs(n)
        mode = "exhaustive"
    else:
        pairs = _sample_pairs(n, samples, np.random.default_rng(seed))
        g.evaluate({m for p in pairs for m in (p[0], p[1], p[0] | p[1])}, map_fn)
        mode = "sampled"
    worst = None
    worst_pair = None
    violations = []
    checked = 0
    for s, t in pairs:
        lhs = g.value(s) + g.value(t)
        rhs = g.value(s | t)
        slack = lhs - rhs
        checked += 1
        if worst is None or slack < worst:
            worst, worst_pair = slack, (s, t)
        if slack < -(g.tolerance(s) + g.tolerance(t)):
            violations.append((s, t, lhs, rhs, slack))
    if mode == "exhaustive":
        assert checked == count_disjoint_pairs(n)
    return SubadditivityReport(g.label, mode, checked, worst, worst_pair, violations)


def check_core_membership(g: GameInstance, alloc, tol=None, *, samples: int = SAMPLED_COALITIONS,
                          seed: int = 0, map_fn=map) -> CoreCheckReport:
    """Check an allocation against every coalition's stand-alone value.

    ``alloc`` is a share vector or an :class:`AllocationResult`.  ``tol``
    overrides the game's per-coalition tolerance with a single value.
    Budget balance must hold exactly.  For Scenario I games the observed
    slack of each coalition is also compared with its closed-form value.
    """
    shares = tuple(Fraction(a) for a in (alloc.shares if isinstance(alloc, AllocationResult) else alloc))
    if len(shares) != g.n:
        raise DimensionMismatch(f"allocation has {len(shares)} entries, game has {g.n} players")
    tol_label = "per-coalition quantile gap" if g.label == SCENARIO_II else "exact"
    if tol is not None:
        tol = Fraction(tol)
        tol_label = f"fixed {float(tol):g}"
    full = g.grand_mask

    if g.int_values is not None and all((s * MONEY_SCALE).denominator == 1 for s in shares):
        share_fx = [int(s * MONEY_SCALE) for s in shares]
        alloc_sums = _mask_sums(g.n, share_fx)
        slack_fx = g.int_values - alloc_sums
        slack_fx[0] = 0
        limit = 0 if tol is None else math.ceil(-tol * MONEY_SCALE)
        slacks = {m: money(int(slack_fx[m])) for m in range(1, full + 1)}
        violations = [(m, money(int(alloc_sums[m])), money(int(g.int_values[m])), slacks[m])
                      for m in range(1, full + 1) if slack_fx[m] < limit]
        mismatches = []
        ctx = g.context
        if tol is None:
            predicted = scenario1_predicted_slack_fx(ctx["x_fx"], ctx["c_fx"], ctx["tariff"])
            mismatches = [m for m in np.flatnonzero(predicted != slack_fx).tolist() if m]
        k = int(np.argmin(slack_fx[1:])) + 1
        gap = money(int(g.int_values[full]) - int(alloc_sums[full]))
        return CoreCheckReport(shares, g.label, "exhaustive", gap, tol_label, slacks, violations, slacks[k], k,
                               Fraction(0) if tol is None else tol, mismatches)

    if g.exhaustive:
        g.materialize(map_fn)
        masks = range(1, full + 1)
        mode = "exhaustive"
    else:
        masks = sorted(set(_sample_masks(g.n, samples, np.random.default_rng(seed))) | {full})
        g.evaluate(masks, map_fn)
        mode = "sampled"
    slacks = {}
    violations = []
    worst = worst_mask = None
    max_tol = Fraction(0)
    for m in masks:
        lhs = sum((shares[i] for i in members_of(m)), Fraction(0))
        rhs = g.value(m)
        slack = rhs - lhs
        slacks[m] = slack
        bound = g.tolerance(m) if tol is None else tol
        max_tol = max(max_tol, bound)
        if worst is None or slack < worst:
            worst, worst_mask = slack, m
        if slack < -bound:
            violations.append((m, lhs, rhs, slack))
    gap = g.value(full) - sum(shares, Fraction(0))
    return CoreCheckReport(shares, g.label, mode, gap, tol_label, slacks, violations, worst,
                           worst_mask, max_tol)


@dataclass
class CoreCertificate:
    """Constructive witness that the core is nonempty: an allocation that passes the core check."""

    allocation: AllocationResult
    report: CoreCheckReport

    @property
    def nonempty(self) -> bool:
        return self.report.verdict


def core_nonemptiness_certificate(g: GameInstance, **kwargs) -> CoreCertificate:
    """Exhibit the closed-form allocation for ``g`` together with its core check."""
    ctx = g.context
    t = ctx["tariff"]
    if g.label == SCENARIO_I:
        caps = CapacityProfile(tuple(ctx["c_fx"]))
        x = [from_fixed(v) for v in ctx["x_fx"]]
        alloc = allocation_scenario1(x, caps, t)
    else:
        joint = ctx["joint"]
        alloc = allocation_scenario2_expected(joint, plan_capacities(joint, t), t)
    return CoreCertificate(alloc, check_core_membership(g, alloc, **kwargs))


def equal_split(g: GameInstance) -> tuple[Fraction, ...]:
    """Split the grand coalition's value equally (a deliberately naive allocation)."""
    total = g.value(g.grand_mask)
    return (total / g.n,) * g.n


__all__ = [
    "GameInstance",
    "SubadditivityReport",
    "CoreCheckReport",
    "CoreCertificate",
    "materialize_game",
    "check_subadditivity",
    "check_core_membership",
    "core_nonemptiness_certificate",
    "equal_split",
    "scenario1_values_fx",
    "scenario1_predicted_slack_fx",
    "scenario1_shares_fx",
]

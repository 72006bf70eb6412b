"""Run every game-theoretic check on a dataset and summarize pass/fail per suite."""
from __future__ import annotations

from fractions import Fraction

from .allocation import (
    allocation_scenario1,
    allocation_scenario2_expected,
    benefit_scenario1,
    benefit_scenario2,
)
from .coalition import members_of
from .costs import CapacityProfile
from .empirical import JointSample
from .errors import TooManyPlayers
from .fixedpoint import from_fixed
from .game import (
    MAX_PLAYERS,
    check_core_membership,
    check_subadditivity,
    equal_split,
    materialize_game,
)
from .planner import CapacityPlan, grid_minimum
from .tariff import Tariff, arbitrage_price


def _f(v):
    return None if v is None else float(v)


def _names(mask, consumers):
    return [consumers[i] for i in members_of(mask)]


def verify_dataset(joint: JointSample, consumers, plan: CapacityPlan, t: Tariff, *,
                   scenarios=(1, 2), max_n: int = MAX_PLAYERS, adversarial: str | None = None,
                   seed: int = 0) -> dict:
    """Check subadditivity, core membership, budget balance and benefit identities.

    Scenario I is checked on every historical day with each consumer owning
    its individually optimal capacity; Scenario II on the whole sample.
    Returns a JSON-ready mapping with one entry per suite and an overall
    ``passed`` flag.
    """
    n = joint.n_consumers
    if n > max_n:
        raise TooManyPlayers(f"{n} consumers exceeds --max-n {max_n}")
    suites = {}
    if 1 in scenarios:
        suites.update(_scenario1_suites(joint, consumers, plan, t, adversarial, seed))
    if 2 in scenarios:
        suites.update(_scenario2_suites(joint, consumers, plan, t, adversarial, seed))
    return {"suites": suites, "passed": all(s["passed"] for s in suites.values())}


def _scenario1_suites(joint, consumers, plan, t, adversarial, seed):
    caps = CapacityProfile(tuple(o.capacity_fx for o in plan.individual))
    sub_worst = None
    sub_viol = []
    pairs = 0
    core_worst = None
    core_viol = []
    mismatches = 0
    budget_ok = True
    benefit_ok = True
    adv = None
    mode = "exhaustive"
    for k, row in enumerate(joint.values_fx):
        x = [from_fixed(int(v)) for v in row]
        g = materialize_game("I", t, x=x, caps=caps)
        sub = check_subadditivity(g, seed=seed)
        mode = sub.mode
        pairs += sub.pairs_checked
        if sub.worst_slack is not None and (sub_worst is None or sub.worst_slack < sub_worst[0]):
            sub_worst = (sub.worst_slack, k, sub.worst_pair)
        sub_viol += [(k,) + v for v in sub.violations]
        alloc = allocation_scenario1(x, caps, t)
        core = check_core_membership(g, alloc, seed=seed)
        budget_ok &= core.budget_balanced and alloc.is_budget_balanced()
        mismatches += len(core.slack_mismatches)
        if core.worst_slack is not None and (core_worst is None or core.worst_slack < core_worst[0]):
            core_worst = (core.worst_slack, k, core.worst_coalition)
        core_viol += [(k,) + v for v in core.violations]
        ben = benefit_scenario1(x, caps, t)
        singles = sum((g.value(1 << i) for i in range(g.n)), Fraction(0))
        benefit_ok &= ben.total_benefit == singles - g.value(g.grand_mask)
        benefit_ok &= all(b == g.value(1 << i) - a
                          for i, (b, a) in enumerate(zip(ben.per_consumer_benefit, alloc.shares)))
        if adversarial == "equal-split" and adv is None:
            rep = check_core_membership(g, equal_split(g), seed=seed)
            adv = _adversarial(rep, consumers, k)
    out = {
        "scenario1_subadditivity": {
            "passed": not sub_viol,
            "mode": mode,
            "days": joint.n_days,
            "pairs_checked": pairs,
            "tolerance": 0.0,
            "worst_slack": _f(sub_worst and sub_worst[0]),
            "worst_day": sub_worst and sub_worst[1],
            "violations": len(sub_viol),
        },
        "scenario1_core": {
            "passed": not core_viol and budget_ok and mismatches == 0,
            "mode": mode,
            "days": joint.n_days,
            "tolerance": 0.0,
            "budget_balanced": budget_ok,
            "slack_formula_mismatches": mismatches,
            "worst_slack": _f(core_worst and core_worst[0]),
            "worst_day": core_worst and core_worst[1],
            "violations": len(core_viol),
        },
        "scenario1_benefit": {"passed": benefit_ok, "tolerance": 0.0},
    }
    if adv is not None:
        out["scenario1_adversarial"] = adv
    return out


def _scenario2_suites(joint, consumers, plan, t, adversarial, seed):
    g = materialize_game("II", t, joint=joint)
    sub = check_subadditivity(g, seed=seed)
    zeta = allocation_scenario2_expected(joint, plan, t)
    core = check_core_membership(g, zeta, seed=seed)
    ben = benefit_scenario2(joint, plan, zeta.shares, t)
    tol_ben = [o.epsilon for o in plan.individual]
    total_route = sum(plan.per_consumer_Jstar, Fraction(0)) - plan.coalition_Jstar
    per_route = [j - z for j, z in zip(plan.per_consumer_Jstar, zeta.shares)]
    benefit_ok = ben.total_benefit == total_route and list(ben.per_consumer_benefit) == per_route
    rational = all(z <= j + e for z, j, e in zip(zeta.shares, plan.per_consumer_Jstar, tol_ben))

    delta = arbitrage_price(t)
    quant = []
    for i in range(joint.n_consumers):
        d = joint.marginal(i)
        gmin, _, step = grid_minimum(d, t)
        opt = plan.individual[i]
        bound = delta * step + opt.epsilon
        quant.append({"consumer": consumers[i], "closed_form": float(opt.value),
                      "direct": float(opt.direct), "grid_min": float(gmin), "tolerance": float(bound),
                      "passed": opt.direct <= gmin and abs(opt.value - gmin) <= bound})
    out = {
        "scenario2_quantile_rule": {
            "passed": all(q["passed"] for q in quant),
            "grid_points": 1000,
            "quantile_convention": "smallest support value with F(c) >= gamma",
            "consumers": quant,
        },
        "scenario2_subadditivity": {
            "passed": sub.passed,
            "mode": sub.mode,
            "pairs_checked": sub.pairs_checked,
            "tolerance": "eps(S) + eps(T), eps = pi_delta * P(x_S = C*_S) * (max x_S - C*_S)",
            "worst_slack": _f(sub.worst_slack),
            "worst_pair": sub.worst_pair and [_names(m, consumers) for m in sub.worst_pair],
            "violations": len(sub.violations),
        },
        "scenario2_core": {
            "passed": core.verdict and rational,
            "mode": core.mode,
            "coalitions_checked": len(core.slacks),
            "budget_balanced": core.budget_balanced,
            "individually_rational": rational,
            "tolerance": "eps(S) per coalition",
            "max_tolerance": float(core.max_tolerance),
            "worst_slack": _f(core.worst_slack),
            "worst_coalition": core.worst_coalition and _names(core.worst_coalition, consumers),
            "violations": len(core.violations),
        },
        "scenario2_benefit": {"passed": benefit_ok, "tolerance": 0.0},
    }
    if adversarial == "equal-split":
        out["scenario2_adversarial"] = _adversarial(check_core_membership(g, equal_split(g), seed=seed),
                                                    consumers, None)
    return out


def _adversarial(rep, consumers, day):
    """Core check of an injected allocation; it passes only if no coalition objects."""
    worst = rep.violations and min(rep.violations, key=lambda v: v[3])
    return {
        "allocation": "equal-split",
        "passed": rep.verdict,
        "day": day,
        "violations": len(rep.violations),
        "violating_coalition": worst and _names(worst[0], consumers),
        "coalition_value": worst and float(worst[2]),
        "allocated": worst and float(worst[1]),
    }

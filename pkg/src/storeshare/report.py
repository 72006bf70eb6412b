"""Run reports: one in-memory mapping rendered as JSON, aligned text, and plot files."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .allocation import allocation_scenario2_expected, benefit_scenario2
from .empirical import DailyPeakSeries, EmpiricalDistribution
from .errors import MissingSection
from .fixedpoint import SCALE
from .planner import CapacityPlan
from .simulate import SimulationResult
from .tariff import Tariff

REPORT_VERSION = 1


def _f(v: Fraction) -> float:
    return float(v)


def plan_section(series: DailyPeakSeries, plan: CapacityPlan, t: Tariff) -> dict:
    """Optimal capacities, expected costs and expected-cost allocation."""
    joint = series.joint()
    zeta = allocation_scenario2_expected(joint, plan, t)
    ben = benefit_scenario2(joint, plan, zeta.shares, t)
    sum_j = sum(plan.per_consumer_Jstar, Fraction(0))
    rows = []
    for cid, opt, z, b in zip(series.consumers, plan.individual, zeta.shares, ben.per_consumer_benefit):
        rows.append({
            "consumer": cid,
            "C_star": _f(opt.capacity),
            "J_star": _f(opt.value),
            "zeta": _f(z),
            "benefit": _f(b),
            "relative_benefit": _f(b / opt.value) if opt.value else 0.0,
            "epsilon": _f(opt.epsilon),
        })
    g = plan.grand
    if zeta.total != g.value:
        raise AssertionError("expected-cost allocation is not budget balanced")
    return {
        "gamma": _f(plan.gamma_used),
        "regime": "no-storage" if plan.no_storage else g.regime,
        "quantile_convention": "smallest support value with F(c) >= gamma",
        "consumers": rows,
        "grand": {
            "C_star": _f(g.capacity),
            "J_star": _f(g.value),
            "J_direct": _f(g.direct),
            "zeta_sum": _f(zeta.total),
            "epsilon": _f(g.epsilon),
        },
        "budget_balanced": zeta.total == g.value,
        "benefit": {
            "total": _f(ben.total_benefit),
            "relative_total": _f(ben.total_benefit / sum_j) if sum_j else 0.0,
        },
    }


def _cdf_points(d: EmpiricalDistribution) -> list[list[float]]:
    vals, counts = np.unique(d.sorted_fx, return_counts=True)
    cum = np.cumsum(counts)
    return [[int(v) / SCALE, int(c) / d.n] for v, c in zip(vals, cum)]


def cdf_section(series: DailyPeakSeries) -> dict:
    joint = series.joint()
    out = {cid: _cdf_points(joint.marginal(i)) for i, cid in enumerate(series.consumers)}
    out["aggregate"] = _cdf_points(EmpiricalDistribution(joint.aggregate_fx()))
    return out


def simulation_section(series: DailyPeakSeries, sim: SimulationResult, seed: int) -> dict:
    rows = []
    for k in range(sim.days):
        src = int(sim.day_index[k])
        rows.append({
            "day": k + 1,
            "source_date": series.dates[src].isoformat(),
            "x": [int(v) / SCALE for v in series.values_fx[src]],
            "cost_I": _f(sim.grand_cost_i[k]),
            "xi": [_f(v) for v in sim.xi[k].shares],
            "cost_II": _f(sim.grand_cost_ii[k]),
            "rho": [_f(v) for v in sim.rho[k].shares],
            "budget_balanced": sim.xi[k].is_budget_balanced() and sim.rho[k].is_budget_balanced(),
        })
    errors = sim.lln_errors()
    return {
        "days": sim.days,
        "sampling": "i.i.d. resampling of historical days",
        "seed": seed,
        "rows": rows,
        "all_budget_balanced": all(r["budget_balanced"] for r in rows),
        "average_rho": [_f(v) for v in sim.rho_average()],
        "average_xi": [float(v) for v in sim.xi_running[-1]] if sim.days else [],
        "lln_relative_error": {str(k): v for k, v in errors.items()},
        "trajectory": {
            "rho": sim.rho_running.tolist(),
            "xi": sim.xi_running.tolist(),
        },
    }


def base_report(cfg_dict: dict, cfg_hash: str, seed: int, data_info: dict) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "units": {"money": "cents", "energy": "kWh"},
        "config": cfg_dict,
        "config_hash": cfg_hash,
        "seed": seed,
        "data": data_info,
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def _table(header, rows):
    cells = [[str(h) for h in header]] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _cell(v):
    if isinstance(v, float):
        return f"{v:.4f}"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def render_text(report: dict) -> str:
    """Human-readable rendering of the same report (values rounded to 4 decimals)."""
    out = [f"storeshare report v{report['report_version']}  config {report['config_hash'][:12]}  "
           f"seed {report['seed']}",
           f"data: {report['data'].get('source')}  days={report['data'].get('days')}  "
           f"consumers={report['data'].get('consumers')}  dropped={report['data'].get('dropped_days')}"]
    plan = report.get("plan")
    if plan:
        out.append("")
        out.append(f"== plan (gamma={plan['gamma']:.6f}, regime={plan['regime']}) [cents, kWh]")
        rows = [[r["consumer"], r["C_star"], r["J_star"], r["zeta"], r["benefit"]]
                for r in plan["consumers"]]
        g = plan["grand"]
        rows.append(["N", g["C_star"], g["J_star"], g["zeta_sum"], plan["benefit"]["total"]])
        out.append(_table(["consumer", "C*", "J*", "zeta", "benefit"], rows))
        out.append(f"relative benefit of the grand coalition: {plan['benefit']['relative_total']:.4f}")
    sim = report.get("simulation")
    if sim:
        out.append("")
        out.append(f"== simulation ({sim['days']} days, {sim['sampling']})")
        shown = sim["rows"][:10]
        if shown:
            n = len(shown[0]["xi"])
            hdr = ["day"] + [f"xi_{i + 1}" for i in range(n)] + ["cost_I"] + \
                  [f"rho_{i + 1}" for i in range(n)] + ["cost_II"]
            out.append(_table(hdr, [[r["day"], *r["xi"], r["cost_I"], *r["rho"], r["cost_II"]]
                                    for r in shown]))
        out.append(f"all days budget balanced: {_cell(sim['all_budget_balanced'])}")
        for d, e in sim["lln_relative_error"].items():
            out.append(f"max relative gap of average rho to zeta after {d} days: {e:.4f}")
    ver = report.get("verification")
    if ver:
        out.append("")
        out.append("== verification")
        for name, s in ver["suites"].items():
            extra = ""
            if "worst_slack" in s and s["worst_slack"] is not None:
                extra = f"  worst slack {s['worst_slack']:.4f}"
            if s.get("violating_coalition"):
                extra += f"  violating coalition {s['violating_coalition']}"
            out.append(f"{'PASS' if s['passed'] else 'FAIL'}  {name}{extra}")
        out.append(f"overall: {'PASS' if ver['passed'] else 'FAIL'}")
    return "\n".join(out) + "\n"


def write_run(report: dict, out_dir, inputs: dict) -> dict:
    """Write report.json, report.txt and manifest.json under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(to_json(report))
    (out / "report.txt").write_text(render_text(report))
    manifest = {
        "report_version": REPORT_VERSION,
        "inputs": inputs,
        "seed": report["seed"],
        "config_hash": report["config_hash"],
        "outputs": ["report.json", "report.txt"],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return manifest


def write_plot_data(report: dict, out_dir) -> list[Path]:
    """Tab-separated CDF point sets and convergence trajectories for external plotting."""
    cdfs = report.get("cdf")
    sim = report.get("simulation")
    if not cdfs and not sim:
        raise MissingSection("report has neither a 'cdf' nor a 'simulation' section")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, pts in (cdfs or {}).items():
        p = out / f"cdf_{name}.tsv"
        with open(p, "w") as fh:
            fh.write("kwh\tcdf\n")
            for x, f in pts:
                fh.write(f"{x!r}\t{f!r}\n")
        written.append(p)
    if sim:
        consumers = [r["consumer"] for r in report["plan"]["consumers"]] if "plan" in report else \
            [str(i + 1) for i in range(len(sim["trajectory"]["rho"][0]) if sim["trajectory"]["rho"] else 0)]
        for key in ("rho", "xi"):
            p = out / f"trajectory_{key}.tsv"
            with open(p, "w") as fh:
                fh.write("\t".join(["D"] + [f"{key}_{c}" for c in consumers]) + "\n")
                for d, row in enumerate(sim["trajectory"][key], start=1):
                    fh.write("\t".join([str(d)] + [repr(v) for v in row]) + "\n")
            written.append(p)
    return written

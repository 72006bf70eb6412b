"""Command-line front end: ``storeshare {synth,plan,simulate,verify,plotdata}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report as rpt
from .allocation import allocation_scenario2_expected
from .data import RunConfig, SynthSpec, generate_synthetic, ingest_intervals, load_config, write_intervals
from .errors import StoreshareError, ValidationError
from .planner import plan_capacities
from .simulate import simulate_days
from .verify import verify_dataset

log = logging.getLogger("storeshare")

MIN_PLAN_DAYS = 30


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "scenario", None) is not None:
        cfg = replace(cfg, scenario=args.scenario)
    return cfg


def _series(args, cfg: RunConfig):
    if args.data:
        series = ingest_intervals(args.data, cfg)
        source = str(args.data)
    else:
        series = generate_synthetic(SynthSpec(seed=cfg.seed, holidays=cfg.holidays))
        source = f"synthetic(seed={cfg.seed})"
    info = {"source": source, "days": series.n_days, "consumers": list(series.consumers),
            "dropped_days": series.dropped_days}
    return series, info


def _prepare(args):
    cfg = _config(args)
    t = cfg.tariff()
    series, info = _series(args, cfg)
    if series.n_days < MIN_PLAN_DAYS:
        raise ValidationError(f"need at least {MIN_PLAN_DAYS} days of data, got {series.n_days}")
    plan = plan_capacities(series.joint(), t)
    report = rpt.base_report(cfg.to_dict(), cfg.digest(), cfg.seed, info)
    report["plan"] = rpt.plan_section(series, plan, t)
    report["cdf"] = rpt.cdf_section(series)
    return cfg, t, series, plan, report


def _scenarios(cfg: RunConfig):
    return (1, 2) if cfg.scenario is None else (cfg.scenario,)


def _emit(report, args, inputs):
    if args.out:
        rpt.write_run(report, args.out, inputs)
        log.info("wrote %s", args.out)
    sys.stdout.write(rpt.render_text(report))


def cmd_plan(args) -> int:
    cfg, t, series, plan, report = _prepare(args)
    _emit(report, args, {"config": args.config, "data": args.data})
    return 0


def cmd_simulate(args) -> int:
    cfg, t, series, plan, report = _prepare(args)
    joint = series.joint()
    zeta = allocation_scenario2_expected(joint, plan, t)
    rng = np.random.default_rng(cfg.seed)
    sim = simulate_days(joint, plan, zeta.shares, t, args.days, rng)
    report["simulation"] = rpt.simulation_section(series, sim, cfg.seed)
    _emit(report, args, {"config": args.config, "data": args.data})
    return 0 if report["simulation"]["all_budget_balanced"] else 1


def cmd_verify(args) -> int:
    cfg, t, series, plan, report = _prepare(args)
    report["verification"] = verify_dataset(series.joint(), series.consumers, plan, t,
                                            scenarios=_scenarios(cfg), max_n=args.max_n,
                                            adversarial=args.adversarial, seed=cfg.seed)
    _emit(report, args, {"config": args.config, "data": args.data})
    ver = report["verification"]
    return 0 if ver["passed"] and all(s["passed"] for s in ver["suites"].values()) else 1


def cmd_synth(args) -> int:
    cfg = _config(args)
    spec = SynthSpec(days=args.days, seed=cfg.seed, holidays=cfg.holidays)
    series = generate_synthetic(spec)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "intervals.csv"
    write_intervals(series, path, cfg.peak_start)
    manifest = {"generator": "gaussian-copula lognormal", "days": spec.days, "seed": spec.seed,
                "means": list(spec.means), "sds": list(spec.sds),
                "correlation": [list(r) for r in spec.correlation], "outputs": [path.name]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    print(path)
    return 0


def cmd_plotdata(args) -> int:
    path = Path(args.report) if args.report else Path(args.out or ".") / "report.json"
    report = json.loads(path.read_text())
    for p in rpt.write_plot_data(report, args.out or path.parent):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="storeshare",
                                 description="Cooperative storage sizing and cost sharing under ToU pricing.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        p.add_argument("--config", help="JSON run configuration")
        if data:
            p.add_argument("--data", help="interval CSV (timestamp,consumer_id,kwh); synthetic if omitted")
        p.add_argument("--out", help="run directory for report.json, report.txt and manifest.json")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--scenario", type=int, choices=(1, 2), help="restrict to one scenario")

    p = sub.add_parser("plan", help="optimal capacities and expected-cost allocation")
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="daily realized cost sharing on resampled days")
    common(p)
    p.add_argument("--days", type=int, default=250)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check subadditivity and core membership")
    common(p)
    p.add_argument("--max-n", type=int, default=20, dest="max_n")
    p.add_argument("--adversarial", choices=("equal-split",),
                   help="also core-check a naive allocation (expected to fail)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="write a synthetic interval CSV")
    common(p, data=False)
    p.add_argument("--days", type=int, default=250)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plotdata", help="CDF and trajectory TSV files from a report")
    p.add_argument("--report", help="report.json (default: <out>/report.json)")
    p.add_argument("--out", help="directory for the TSV files")
    p.set_defaults(func=cmd_plotdata)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "days", 0) < 0:
        print("error: --days must be nonnegative", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (StoreshareError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

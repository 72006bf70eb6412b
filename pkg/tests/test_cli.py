import json

import pytest

from storeshare.cli import main
from storeshare.data import SynthSpec, generate_synthetic, write_intervals
from storeshare.empirical import DailyPeakSeries


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def _report(path):
    return json.loads((path / "report.json").read_text())


@pytest.fixture(scope="module")
def households(tmp_path_factory):
    d = tmp_path_factory.mktemp("hh")
    p = d / "intervals.csv"
    write_intervals(generate_synthetic(SynthSpec(days=120, seed=3)), p)
    return p


def _series_csv(path, columns, consumers=None):
    values = [list(day) for day in zip(*columns)]
    write_intervals(DailyPeakSeries.from_values(values, consumers=consumers), path)
    return path


def test_plan_five_households(households, tmp_path, capsys):
    code, out = _run(capsys, "plan", "--data", households, "--out", tmp_path)
    assert code == 0
    plan = _report(tmp_path)["plan"]
    assert plan["budget_balanced"] and plan["regime"] == "interior"
    assert plan["gamma"] == pytest.approx(20 / 35)
    for row in plan["consumers"]:
        assert row["zeta"] <= row["J_star"] + 1e-9
    assert sum(r["zeta"] for r in plan["consumers"]) == pytest.approx(plan["grand"]["J_star"], abs=1e-9)
    assert plan["grand"]["J_star"] <= plan["grand"]["J_direct"] <= plan["grand"]["J_star"] + plan["grand"]["epsilon"]
    assert "zeta" in out.out and {"report.json", "report.txt", "manifest.json"} <= {
        p.name for p in tmp_path.iterdir()}


def test_plan_single_consumer(tmp_path, capsys):
    p = _series_csv(tmp_path / "one.csv", [[10 + (k % 7) for k in range(40)]])
    code, _ = _run(capsys, "plan", "--data", p, "--out", tmp_path / "r")
    assert code == 0
    plan = _report(tmp_path / "r")["plan"]
    (row,) = plan["consumers"]
    assert row["zeta"] == pytest.approx(row["J_star"]) == pytest.approx(plan["grand"]["J_star"])
    assert row["benefit"] == 0


def test_plan_gamma_zero_means_no_storage(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tariff": {"pi_shared": 35}}))
    p = _series_csv(tmp_path / "d.csv", [[5 + k % 4 for k in range(35)], [9 - k % 3 for k in range(35)]])
    code, _ = _run(capsys, "plan", "--config", cfg, "--data", p, "--out", tmp_path / "r")
    assert code == 0
    plan = _report(tmp_path / "r")["plan"]
    assert plan["gamma"] == 0 and plan["regime"] == "no-storage"
    assert plan["grand"]["C_star"] == 0
    # every unit of peak energy is bought at the peak price
    assert plan["grand"]["J_star"] == pytest.approx(55 * sum(r["J_star"] / 55 for r in plan["consumers"]))


def test_plan_needs_thirty_days(tmp_path, capsys):
    p = _series_csv(tmp_path / "short.csv", [[1] * 10])
    code, out = _run(capsys, "plan", "--data", p)
    assert code == 2 and "30" in out.err


def test_simulate_rows_are_balanced(households, tmp_path, capsys):
    code, _ = _run(capsys, "simulate", "--data", households, "--days", 10, "--out", tmp_path)
    assert code == 0
    rep = _report(tmp_path)
    sim = rep["simulation"]
    assert sim["days"] == 10 and len(sim["rows"]) == 10
    for r in sim["rows"]:
        assert r["budget_balanced"]
        assert sum(r["rho"]) == pytest.approx(r["cost_II"], abs=1e-9)
        assert sum(r["xi"]) == pytest.approx(r["cost_I"], abs=1e-9)


def test_simulate_zero_days(households, tmp_path, capsys):
    code, _ = _run(capsys, "simulate", "--data", households, "--days", 0, "--out", tmp_path)
    assert code == 0
    sim = _report(tmp_path)["simulation"]
    assert sim["rows"] == [] and sim["days"] == 0


def test_negative_days_rejected(capsys):
    code, out = _run(capsys, "simulate", "--days", -1)
    assert code == 2


def test_verify_passes(households, tmp_path, capsys):
    code, out = _run(capsys, "verify", "--data", households, "--out", tmp_path)
    assert code == 0, out.out
    ver = _report(tmp_path)["verification"]
    assert ver["passed"] and all(s["passed"] for s in ver["suites"].values())
    assert "FAIL" not in out.out


def test_verify_adversarial_names_coalition(households, tmp_path, capsys):
    code, out = _run(capsys, "verify", "--data", households, "--adversarial", "equal-split",
                     "--out", tmp_path)
    ver = _report(tmp_path)["verification"]
    adv = [s for k, s in ver["suites"].items() if k.endswith("_adversarial")]
    assert adv and not all(s["passed"] for s in adv)
    failing = [s for s in adv if not s["passed"]]
    assert all(s["violating_coalition"] for s in failing)
    assert code == 1 and "violating coalition" in out.out


def test_verify_single_consumer(tmp_path, capsys):
    p = _series_csv(tmp_path / "one.csv", [[3 + (k * 7) % 11 for k in range(40)]])
    code, out = _run(capsys, "verify", "--data", p)
    assert code == 0, out.out


def test_verify_scenario_filter(households, tmp_path, capsys):
    code, _ = _run(capsys, "verify", "--data", households, "--scenario", 1, "--out", tmp_path)
    assert code == 0
    suites = _report(tmp_path)["verification"]["suites"]
    assert "scenario1_subadditivity" in suites and "scenario2_subadditivity" not in suites


def test_plotdata(households, tmp_path, capsys):
    _run(capsys, "simulate", "--data", households, "--days", 25, "--out", tmp_path)
    code, _ = _run(capsys, "plotdata", "--report", tmp_path / "report.json", "--out", tmp_path / "plots")
    assert code == 0
    plots = tmp_path / "plots"
    for name in ("1", "5", "aggregate"):
        lines = (plots / f"cdf_{name}.tsv").read_text().splitlines()
        assert lines[0] == "kwh\tcdf"
        pts = [tuple(map(float, l.split("\t"))) for l in lines[1:]]
        assert pts[-1][1] == 1.0
        assert all(a[0] < b[0] and a[1] < b[1] for a, b in zip(pts, pts[1:]))
    traj = (plots / "trajectory_rho.tsv").read_text().splitlines()
    assert len(traj) == 1 + 25 and traj[0].split("\t")[0] == "D"


def test_plotdata_missing_sections(tmp_path, capsys):
    p = tmp_path / "report.json"
    p.write_text(json.dumps({"report_version": 1}))
    code, out = _run(capsys, "plotdata", "--report", p, "--out", tmp_path)
    assert code == 2 and "cdf" in out.err


def test_comonotone_aggregate_maximum(tmp_path, capsys):
    col = [4 + (k * 3) % 13 for k in range(40)]
    p = _series_csv(tmp_path / "co.csv", [col, [2 * v for v in col]])
    _run(capsys, "plan", "--data", p, "--out", tmp_path / "r")
    _run(capsys, "plotdata", "--report", tmp_path / "r" / "report.json", "--out", tmp_path / "pl")
    agg = (tmp_path / "pl" / "cdf_aggregate.tsv").read_text().splitlines()
    assert float(agg[-1].split("\t")[0]) == max(col) * 3


def test_report_json_round_trip(households, tmp_path, capsys):
    _run(capsys, "simulate", "--data", households, "--days", 5, "--out", tmp_path)
    text = (tmp_path / "report.json").read_text()
    rep = json.loads(text)
    assert json.dumps(rep, indent=1, sort_keys=True) + "\n" == text
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["config_hash"] == rep["config_hash"] and man["seed"] == rep["seed"]


def test_runs_are_byte_identical(households, tmp_path, capsys):
    for name in ("a", "b"):
        _run(capsys, "simulate", "--data", households, "--days", 30, "--seed", 11, "--out", tmp_path / name)
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    _run(capsys, "simulate", "--data", households, "--days", 30, "--seed", 12, "--out", tmp_path / "c")
    assert (tmp_path / "a" / "report.json").read_bytes() != (tmp_path / "c" / "report.json").read_bytes()


def test_synth_command(tmp_path, capsys):
    code, out = _run(capsys, "synth", "--days", 35, "--seed", 1, "--out", tmp_path)
    assert code == 0 and (tmp_path / "intervals.csv").exists()
    code, _ = _run(capsys, "plan", "--data", tmp_path / "intervals.csv")
    assert code == 0

"""Run configuration, interval-data ingestion and synthetic data generation."""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
from decimal import Decimal, InvalidOperation
from dataclasses import asdict, dataclass
from pathlib import Path
import numpy as np

from .empirical import DailyPeakSeries, weekdays
from .errors import EmptyAfterFilter, NonPSDCorrelation, ParseError, ValidationError, ViabilityError
from .fixedpoint import SCALE, to_fixed
from .tariff import Tariff

# Daily peak-window consumption of the five case-study households.  The
# lognormal mean/sd pairs (kWh) reproduce the published optimal capacities
# and expected costs at 55/20/15 cents.
CASE_STUDY_CORRELATION = (
    (1.000000, 0.363586, 0.297733, 0.292073, 0.486665),
    (0.363586, 1.000000, 0.132320, 0.453056, 0.157210),
    (0.297733, 0.132320, 1.000000, 0.085868, 0.365212),
    (0.292073, 0.453056, 0.085868, 1.000000, -0.056696),
    (0.486665, 0.157210, 0.365212, -0.056696, 1.000000),
)
CASE_STUDY_MEANS = (22.83, 14.24, 13.78, 13.19, 29.79)
CASE_STUDY_SDS = (7.44, 6.13, 9.67, 4.75, 10.90)


@dataclass(frozen=True)
class RunConfig:
    pi_h: float = 55
    pi_l: float = 20
    pi_shared: float = 15
    pi_i: tuple[float, ...] | None = None
    peak_start: int = 7
    peak_end: int = 23
    exclude_weekends: bool = True
    holidays: tuple[dt.date, ...] = ()
    scenario: int | None = None
    seed: int = 0
    out: str | None = None

    def tariff(self) -> Tariff:
        return Tariff.from_prices(self.pi_h, self.pi_l, self.pi_shared, self.pi_i)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["holidays"] = [h.isoformat() for h in self.holidays]
        d["pi_i"] = None if self.pi_i is None else list(self.pi_i)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


_TARIFF_KEYS = {"pi_h", "pi_l", "pi_shared", "pi_i"}
_WINDOW_KEYS = {"start", "end"}
_TOP_KEYS = {"tariff", "peak_window", "exclude_weekends", "holidays", "scenario", "seed", "out"}


def _number(problems, where, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{where} must be a number, got {value!r}")
        return None
    return value


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a config mapping, filling omitted fields with the case-study defaults.

    Collects every problem before raising.
    """
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    for k in sorted(set(raw) - _TOP_KEYS):
        problems.append(f"unknown config key {k!r}")
    kw: dict = {}
    tariff = raw.get("tariff", {}) or {}
    if not isinstance(tariff, dict):
        problems.append("tariff must be an object")
        tariff = {}
    for k in sorted(set(tariff) - _TARIFF_KEYS):
        problems.append(f"unknown tariff key {k!r}")
    for k in ("pi_h", "pi_l", "pi_shared"):
        if k in tariff:
            v = _number(problems, f"tariff.{k}", tariff[k])
            if v is not None:
                kw[k] = v
    if tariff.get("pi_i") is not None:
        pis = tariff["pi_i"]
        if not isinstance(pis, list):
            problems.append("tariff.pi_i must be a list")
        else:
            vals = [_number(problems, f"tariff.pi_i[{i}]", v) for i, v in enumerate(pis)]
            if None not in vals:
                kw["pi_i"] = tuple(vals)
    window = raw.get("peak_window", {}) or {}
    if not isinstance(window, dict):
        problems.append("peak_window must be an object")
        window = {}
    for k in sorted(set(window) - _WINDOW_KEYS):
        problems.append(f"unknown peak_window key {k!r}")
    for src, dst in (("start", "peak_start"), ("end", "peak_end")):
        if src in window:
            v = window[src]
            if isinstance(v, bool) or not isinstance(v, int):
                problems.append(f"peak_window.{src} must be an integer hour")
            else:
                kw[dst] = v
    if "exclude_weekends" in raw:
        if not isinstance(raw["exclude_weekends"], bool):
            problems.append("exclude_weekends must be true or false")
        else:
            kw["exclude_weekends"] = raw["exclude_weekends"]
    if "holidays" in raw:
        hs = []
        for h in raw["holidays"] or []:
            try:
                hs.append(dt.date.fromisoformat(h))
            except (TypeError, ValueError):
                problems.append(f"holiday {h!r} is not an ISO date")
        kw["holidays"] = tuple(sorted(set(hs)))
    if "scenario" in raw:
        if raw["scenario"] not in (1, 2, None):
            problems.append("scenario must be 1, 2 or null")
        else:
            kw["scenario"] = raw["scenario"]
    if "seed" in raw:
        if isinstance(raw["seed"], bool) or not isinstance(raw["seed"], int) or raw["seed"] < 0:
            problems.append("seed must be a nonnegative integer")
        else:
            kw["seed"] = raw["seed"]
    if "out" in raw:
        if raw["out"] is not None and not isinstance(raw["out"], str):
            problems.append("out must be a path string")
        else:
            kw["out"] = raw["out"]

    cfg = RunConfig(**kw)
    if not 0 <= cfg.peak_start < cfg.peak_end <= 24:
        problems.append(
            f"peak window must satisfy 0 <= start < end <= 24, got {cfg.peak_start}-{cfg.peak_end}"
        )
    viability: list[str] = []
    try:
        cfg.tariff()
    except ViabilityError as e:
        viability = e.problems
    except ValidationError as e:
        problems.extend(e.problems)
    if problems:
        raise ValidationError(problems + viability)
    if viability:
        raise ViabilityError(viability)
    return cfg


def load_config(path) -> RunConfig:
    """Read a JSON run configuration; an empty file or ``{}`` gives the defaults."""
    text = Path(path).read_text()
    if not text.strip():
        return RunConfig()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"config is not valid JSON: {e}") from e
    return config_from_dict(raw)


def ingest_intervals(path, cfg: RunConfig | None = None) -> DailyPeakSeries:
    """Sum interval energy inside the peak window per day and consumer.

    CSV columns: ``timestamp,consumer_id,kwh``.  A row's energy belongs to
    the hour its timestamp starts in; rows with ``start <= hour < end`` count
    toward the peak.  Weekends (if excluded) and configured holidays are
    dropped.  Days on which some consumer has no rows at all are dropped
    and counted in ``dropped_days``.
    """
    cfg = cfg or RunConfig()
    holidays = set(cfg.holidays)
    peak: dict[tuple[dt.date, str], int] = {}
    off: dict[tuple[dt.date, str], int] = {}
    seen: set[tuple[dt.datetime, str]] = set()
    consumers: set[str] = set()
    days: set[dt.date] = set()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["timestamp", "consumer_id", "kwh"]:
            raise ParseError("header must be 'timestamp,consumer_id,kwh'", line=1)
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line)
            ts_raw, cid, kwh_raw = (c.strip() for c in row)
            try:
                ts = dt.datetime.fromisoformat(ts_raw)
            except ValueError:
                raise ParseError(f"unparseable timestamp {ts_raw!r}", line) from None
            if not cid:
                raise ParseError("empty consumer_id", line)
            try:
                kwh = Decimal(kwh_raw)
            except InvalidOperation:
                raise ParseError(f"unparseable kwh {kwh_raw!r}", line) from None
            if not kwh.is_finite() or kwh < 0:
                raise ParseError(f"energy must be a nonnegative number, got {kwh_raw}", line)
            if (ts, cid) in seen:
                raise ParseError(f"duplicate reading for consumer {cid} at {ts_raw}", line)
            seen.add((ts, cid))
            consumers.add(cid)
            day = ts.date()
            if cfg.exclude_weekends and day.weekday() >= 5:
                continue
            if day in holidays:
                continue
            days.add(day)
            key = (day, cid)
            peak.setdefault(key, 0)
            off.setdefault(key, 0)
            bucket = peak if cfg.peak_start <= ts.hour < cfg.peak_end else off
            bucket[key] += to_fixed(kwh)
    if not days:
        raise EmptyAfterFilter("no readings remain after weekend/holiday filtering")
    ids = tuple(sorted(consumers, key=_consumer_key))
    kept = [d for d in sorted(days) if all((d, c) in peak for c in ids)]
    dropped = len(days) - len(kept)
    if not kept:
        raise EmptyAfterFilter("no day has readings for every consumer")
    values = np.array([[peak[(d, c)] for c in ids] for d in kept], dtype=np.int64)
    off_values = np.array([[off[(d, c)] for c in ids] for d in kept], dtype=np.int64)
    return DailyPeakSeries(tuple(kept), ids, values, dropped, off_values)


def _consumer_key(c: str):
    return (0, int(c), "") if c.isdigit() else (1, 0, c)


@dataclass(frozen=True)
class SynthSpec:
    """Correlated lognormal daily peak consumption.

    ``means`` and ``sds`` are the mean and standard deviation of each
    consumer's daily peak consumption (kWh); ``correlation`` is the target
    Pearson correlation between consumers' consumption.
    """

    means: tuple[float, ...] = CASE_STUDY_MEANS
    sds: tuple[float, ...] = CASE_STUDY_SDS
    correlation: tuple[tuple[float, ...], ...] = CASE_STUDY_CORRELATION
    days: int = 250
    seed: int = 0
    start: dt.date = dt.date(2016, 1, 4)
    holidays: tuple[dt.date, ...] = ()

    @property
    def n(self) -> int:
        return len(self.means)


def _check_correlation(r: np.ndarray, what: str):
    n = r.shape[0]
    if r.shape != (n, n):
        raise NonPSDCorrelation(f"{what} matrix must be square")
    if not np.allclose(r, r.T, atol=1e-12):
        raise NonPSDCorrelation(f"{what} matrix is not symmetric")
    if not np.allclose(np.diag(r), 1.0):
        raise NonPSDCorrelation(f"{what} matrix must have unit diagonal")
    w = np.linalg.eigvalsh(r)
    if w.min() < -1e-10:
        raise NonPSDCorrelation(f"{what} matrix is not positive semidefinite (min eigenvalue {w.min():.3g})")


def latent_correlation(spec: SynthSpec) -> np.ndarray:
    """Gaussian-copula correlation that gives the target correlation after the lognormal transform.

    For lognormals with log-scale sds ``s_i, s_j`` the output correlation is
    ``(exp(rho s_i s_j) - 1) / sqrt((exp(s_i^2) - 1)(exp(s_j^2) - 1))``,
    which is inverted entrywise.
    """
    target = np.asarray(spec.correlation, dtype=np.float64)
    _check_correlation(target, "target correlation")
    m = np.asarray(spec.means, dtype=np.float64)
    sd = np.asarray(spec.sds, dtype=np.float64)
    s = np.sqrt(np.log1p((sd / m) ** 2))
    var = np.expm1(s**2)
    rho = np.log1p(target * np.sqrt(np.outer(var, var))) / np.outer(s, s)
    if not np.all(np.isfinite(rho)) or np.abs(rho).max() > 1 + 1e-9:
        raise NonPSDCorrelation("target correlation is not attainable with these lognormal marginals")
    rho = np.clip((rho + rho.T) / 2, -1.0, 1.0)
    np.fill_diagonal(rho, 1.0)
    _check_correlation(rho, "latent Gaussian correlation")
    return rho


def generate_synthetic(spec: SynthSpec = SynthSpec()) -> DailyPeakSeries:
    """Draw ``spec.days`` weekdays of correlated lognormal consumption (deterministic in the seed)."""
    n = spec.n
    if len(spec.sds) != n or np.asarray(spec.correlation).shape != (n, n):
        raise ValidationError("means, sds and correlation must describe the same consumers")
    if any(m <= 0 for m in spec.means) or any(s <= 0 for s in spec.sds):
        raise ValidationError("lognormal means and sds must be positive")
    if spec.days < 1:
        raise ValidationError("need at least one day")
    rho = latent_correlation(spec)
    w, v = np.linalg.eigh(rho)
    factor = v * np.sqrt(np.clip(w, 0, None))
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal((spec.days, n)) @ factor.T
    # perfectly correlated consumers share one latent draw exactly
    for j in range(n):
        for i in range(j):
            if rho[i, j] == 1.0:
                z[:, j] = z[:, i]
                break
    m = np.asarray(spec.means, dtype=np.float64)
    sd = np.asarray(spec.sds, dtype=np.float64)
    s = np.sqrt(np.log1p((sd / m) ** 2))
    mu = np.log(m) - s**2 / 2
    x = np.exp(mu + s * z)
    values = np.rint(x * SCALE).astype(np.int64)
    dates = weekdays(spec.start, spec.days, spec.holidays)
    return DailyPeakSeries(tuple(dates), tuple(str(i + 1) for i in range(n)), values)


def write_intervals(series: DailyPeakSeries, path, peak_start: int = 7):
    """Write a daily series in the interval CSV format (one reading per day and consumer).

    Each reading is stamped at the start of the peak window, so re-ingesting
    with the same window reproduces the series exactly.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "consumer_id", "kwh"])
        for d, row in zip(series.dates, series.values_fx):
            ts = dt.datetime.combine(d, dt.time(peak_start)).isoformat()
            for cid, v in zip(series.consumers, row):
                w.writerow([ts, cid, _fmt_fixed(int(v))])


def _fmt_fixed(v: int) -> str:
    sign = "-" if v < 0 else ""
    q, r = divmod(abs(v), SCALE)
    return f"{sign}{q}.{r:04d}"

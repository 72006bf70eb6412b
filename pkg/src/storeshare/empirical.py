"""Daily peak-consumption samples and their empirical distributions.

Every statistic is computed under the empirical measure of the sample
(uniform weight per day).  Sample values are fixed-point integers, so
counts, means and conditional means come out as exact fractions.
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np

from .coalition import as_coalition
from .errors import (
    DegenerateVariance,
    DimensionMismatch,
    EmptyConditioningEvent,
    EmptyDistribution,
    ValidationError,
)
from .fixedpoint import SCALE, to_fixed


def _quantize_matrix(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind in "iu":
        return arr.astype(np.int64) * SCALE
    if arr.dtype == object:
        return np.array([[to_fixed(v) for v in row] for row in arr], dtype=np.int64).reshape(arr.shape)
    # round-half-even on the float grid, identical to to_fixed for values with <= 4 decimals
    return np.rint(arr.astype(np.float64) * SCALE).astype(np.int64)


@dataclass(frozen=True, eq=False)
class DailyPeakSeries:
    """Per-day, per-consumer peak-window consumption (kWh).

    ``values_fx`` is a ``(days, consumers)`` int64 matrix in units of
    ``1/SCALE`` kWh.  ``dropped_days`` counts days discarded upstream because
    some consumer had no data.
    """

    dates: tuple[dt.date, ...]
    consumers: tuple[str, ...]
    values_fx: np.ndarray
    dropped_days: int = 0
    off_window_fx: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        v = self.values_fx
        if v.ndim != 2:
            raise ValidationError("consumption matrix must be 2-D (days x consumers)")
        if v.shape != (len(self.dates), len(self.consumers)):
            raise DimensionMismatch(
                f"matrix shape {v.shape} does not match {len(self.dates)} dates x "
                f"{len(self.consumers)} consumers"
            )
        if v.size and v.min() < 0:
            raise ValidationError("peak consumption must be nonnegative")
        v.setflags(write=False)

    @classmethod
    def from_values(cls, values, dates=None, consumers=None) -> "DailyPeakSeries":
        """Build a series from a days x consumers array of kWh (quantized to 1e-4)."""
        fx = _quantize_matrix(values)
        if fx.ndim == 1:
            fx = fx[:, None]
        days, n = fx.shape
        if dates is None:
            dates = weekdays(dt.date(2016, 1, 4), days)
        if consumers is None:
            consumers = tuple(str(i + 1) for i in range(n))
        return cls(tuple(dates), tuple(str(c) for c in consumers), fx)

    @property
    def n_days(self) -> int:
        return self.values_fx.shape[0]

    @property
    def n_consumers(self) -> int:
        return self.values_fx.shape[1]

    @property
    def values(self) -> np.ndarray:
        return self.values_fx / SCALE

    def joint(self) -> "JointSample":
        return JointSample(self.values_fx)

    def take_days(self, idx) -> "DailyPeakSeries":
        idx = np.asarray(idx, dtype=np.intp)
        return DailyPeakSeries(
            tuple(self.dates[i] for i in idx), self.consumers, self.values_fx[idx].copy()
        )

    def __eq__(self, other):
        if not isinstance(other, DailyPeakSeries):
            return NotImplemented
        return (
            self.dates == other.dates
            and self.consumers == other.consumers
            and self.dropped_days == other.dropped_days
            and np.array_equal(self.values_fx, other.values_fx)
        )


def weekdays(start: dt.date, count: int, holidays=()) -> list[dt.date]:
    """The first ``count`` non-weekend, non-holiday dates on or after ``start``."""
    holidays = set(holidays)
    out = []
    d = start
    while len(out) < count:
        if d.weekday() < 5 and d not in holidays:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


class EmpiricalDistribution:
    """Step CDF of a sample of nonnegative kWh values, uniform weight ``1/n``."""

    __slots__ = ("sorted_fx",)

    def __init__(self, samples_fx):
        arr = np.sort(np.asarray(samples_fx, dtype=np.int64).ravel())
        if arr.size == 0:
            raise EmptyDistribution("empirical distribution needs at least one sample")
        arr.setflags(write=False)
        self.sorted_fx = arr

    @classmethod
    def from_values(cls, values) -> "EmpiricalDistribution":
        return cls(_quantize_matrix(np.atleast_1d(np.asarray(values))))

    @property
    def n(self) -> int:
        return int(self.sorted_fx.size)

    @property
    def sorted_support(self) -> np.ndarray:
        return self.sorted_fx / SCALE

    @property
    def max_fx(self) -> int:
        return int(self.sorted_fx[-1])

    def count_le(self, c_fx: int) -> int:
        return int(np.searchsorted(self.sorted_fx, c_fx, side="right"))

    def count_ge(self, c_fx: int) -> int:
        return self.n - int(np.searchsorted(self.sorted_fx, c_fx, side="left"))

    def cdf_fx(self, c_fx: int) -> Fraction:
        return Fraction(self.count_le(c_fx), self.n)

    def cdf(self, c) -> Fraction:
        """P(x <= c) under the empirical measure."""
        return self.cdf_fx(to_fixed(c))

    def jump_fx(self, c_fx: int) -> Fraction:
        """Probability mass sitting exactly at ``c``."""
        lo = int(np.searchsorted(self.sorted_fx, c_fx, side="left"))
        return Fraction(self.count_le(c_fx) - lo, self.n)

    def quantile_fx(self, gamma) -> int:
        """Generalized inverse: smallest support value ``c`` with ``cdf(c) >= gamma``.

        ``gamma == 0`` maps to 0 (no storage) rather than the sample minimum.
        """
        g = Fraction(gamma)
        if g < 0 or g > 1:
            raise ValueError(f"probability level must lie in [0, 1], got {gamma}")
        if g == 0:
            return 0
        k = math.ceil(g * self.n)
        return int(self.sorted_fx[k - 1])

    def quantile(self, gamma) -> Fraction:
        return Fraction(self.quantile_fx(gamma), SCALE)

    def sum_fx(self) -> int:
        return int(self.sorted_fx.sum())

    def mean(self) -> Fraction:
        return Fraction(self.sum_fx(), self.n * SCALE)

    def tail_mean_fx(self, c_fx: int) -> Fraction:
        """E[x | x >= c] in kWh."""
        lo = int(np.searchsorted(self.sorted_fx, c_fx, side="left"))
        if lo == self.n:
            raise EmptyConditioningEvent(f"no sample at or above {Fraction(c_fx, SCALE)} kWh")
        return Fraction(int(self.sorted_fx[lo:].sum()), (self.n - lo) * SCALE)

    def tail_mean(self, c) -> Fraction:
        return self.tail_mean_fx(to_fixed(c))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"EmpiricalDistribution(n={self.n}, max={self.max_fx / SCALE})"


class JointSample:
    """Day-aligned consumption of several consumers (days x consumers, fixed point).

    Alignment is what makes joint events such as ``{x_N >= C}`` meaningful.
    """

    __slots__ = ("values_fx",)

    def __init__(self, values_fx):
        arr = np.asarray(values_fx, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DimensionMismatch("joint sample must be 2-D (days x consumers)")
        if arr.shape[0] == 0:
            raise EmptyDistribution("joint sample has no days")
        if arr.size and arr.min() < 0:
            raise ValidationError("consumption must be nonnegative")
        arr.setflags(write=False)
        self.values_fx = arr

    @classmethod
    def from_values(cls, values) -> "JointSample":
        return cls(_quantize_matrix(values))

    @property
    def n_days(self) -> int:
        return self.values_fx.shape[0]

    @property
    def n_consumers(self) -> int:
        return self.values_fx.shape[1]

    def aggregate_fx(self, s=None) -> np.ndarray:
        """Day-wise sums over the members of ``s`` (grand coalition by default)."""
        if s is None:
            return self.values_fx.sum(axis=1)
        c = as_coalition(s).require_within(self.n_consumers)
        return self.values_fx[:, list(c.members)].sum(axis=1)

    def restrict(self, s) -> "JointSample":
        c = as_coalition(s).require_within(self.n_consumers)
        return JointSample(self.values_fx[:, list(c.members)])

    def marginal(self, i: int) -> EmpiricalDistribution:
        return EmpiricalDistribution(self.values_fx[:, i])

    def column_mean(self, i: int) -> Fraction:
        return Fraction(int(self.values_fx[:, i].sum()), self.n_days * SCALE)


def aggregate(j: JointSample, s) -> EmpiricalDistribution:
    """Distribution of the coalition's day-wise total consumption."""
    return EmpiricalDistribution(j.aggregate_fx(as_coalition(s)))


def cdf(d: EmpiricalDistribution, c) -> Fraction:
    return d.cdf(c)


def quantile(d: EmpiricalDistribution, gamma) -> Fraction:
    return d.quantile(gamma)


def conditional_mean_given_aggregate(j: JointSample, i: int, threshold, s=None) -> Fraction:
    """Mean of consumer ``i``'s consumption over days where the aggregate reaches ``threshold``.

    The aggregate is over ``s`` (all consumers by default); the event uses a
    weak inequality.
    """
    return conditional_mean_fx(j, i, to_fixed(threshold), s)


def conditional_mean_fx(j: JointSample, i: int, threshold_fx: int, s=None) -> Fraction:
    mask = j.aggregate_fx(s) >= threshold_fx
    k = int(mask.sum())
    if k == 0:
        raise EmptyConditioningEvent(
            f"no day has aggregate consumption >= {Fraction(threshold_fx, SCALE)} kWh"
        )
    return Fraction(int(j.values_fx[mask, i].sum()), k * SCALE)


def correlation_matrix(series) -> np.ndarray:
    """Pearson correlation coefficients between consumers' daily peak consumption."""
    v = series.values_fx if hasattr(series, "values_fx") else _quantize_matrix(series)
    if v.shape[0] < 2:
        raise DegenerateVariance("need at least two days to estimate correlations")
    x = v.astype(np.float64) / SCALE
    sd = x.std(axis=0)
    flat = [int(k) for k in np.flatnonzero(sd == 0)]
    if flat:
        raise DegenerateVariance(f"consumers {flat} have constant consumption")
    r = np.corrcoef(x, rowvar=False)
    r = np.atleast_2d(r)
    r = (r + r.T) / 2
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


__all__ = [
    "DailyPeakSeries",
    "EmpiricalDistribution",
    "JointSample",
    "aggregate",
    "cdf",
    "quantile",
    "conditional_mean_given_aggregate",
    "conditional_mean_fx",
    "correlation_matrix",
    "weekdays",
]

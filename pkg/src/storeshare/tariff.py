"""Two-period time-of-use tariff and the derived arbitrage quantities."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionMismatch, ValidationError, ViabilityError
from .fixedpoint import from_fixed, to_fixed


@dataclass(frozen=True)
class Tariff:
    """Peak/off-peak prices plus daily amortized capital costs.

    All prices are in cents per kWh (capital costs: cents per kWh of
    capacity per day) and are stored as fixed-point integers.  Construct
    with :meth:`from_prices`; the raw fields hold scaled integers.

    ``pi_i`` holds the per-consumer capital costs used when consumers pool
    storage they already own.  It may be empty, in which case every
    consumer is charged ``pi_shared``.
    """

    pi_h_fx: int
    pi_l_fx: int
    pi_shared_fx: int
    pi_i_fx: tuple[int, ...] = field(default=())

    def __post_init__(self):
        problems = []
        viability = []
        if not self.pi_l_fx > 0:
            problems.append(f"off-peak price must be positive, got {from_fixed(self.pi_l_fx)}")
        if not self.pi_h_fx > self.pi_l_fx:
            problems.append(
                f"peak price {from_fixed(self.pi_h_fx)} must exceed off-peak price "
                f"{from_fixed(self.pi_l_fx)}"
            )
        delta = self.pi_h_fx - self.pi_l_fx
        if self.pi_shared_fx < 0:
            problems.append("shared capital cost must be nonnegative")
        elif delta > 0 and self.pi_shared_fx > delta:
            viability.append(
                f"shared capital cost {from_fixed(self.pi_shared_fx)} exceeds arbitrage "
                f"price {from_fixed(delta)}"
            )
        for i, p in enumerate(self.pi_i_fx):
            if p < 0:
                problems.append(f"capital cost of consumer {i} must be nonnegative")
            elif delta > 0 and p > delta:
                viability.append(
                    f"capital cost {from_fixed(p)} of consumer {i} exceeds arbitrage "
                    f"price {from_fixed(delta)}"
                )
        if problems:
            raise ValidationError(problems + viability)
        if viability:
            raise ViabilityError(viability)

    @classmethod
    def from_prices(
        cls,
        pi_h,
        pi_l,
        pi_shared=0,
        pi_i: Sequence | Mapping[int, object] | None = None,
    ) -> "Tariff":
        if pi_i is None:
            caps = ()
        elif isinstance(pi_i, Mapping):
            n = max(pi_i) + 1 if pi_i else 0
            if sorted(pi_i) != list(range(n)):
                raise ValidationError("per-consumer capital costs must cover consumers 0..n-1")
            caps = tuple(to_fixed(pi_i[k]) for k in range(n))
        else:
            caps = tuple(to_fixed(p) for p in pi_i)
        return cls(to_fixed(pi_h), to_fixed(pi_l), to_fixed(pi_shared), caps)

    @property
    def pi_h(self) -> Fraction:
        return from_fixed(self.pi_h_fx)

    @property
    def pi_l(self) -> Fraction:
        return from_fixed(self.pi_l_fx)

    @property
    def pi_shared(self) -> Fraction:
        return from_fixed(self.pi_shared_fx)

    @property
    def pi_delta_fx(self) -> int:
        return self.pi_h_fx - self.pi_l_fx

    def capital_cost_fx(self, consumer: int) -> int:
        """Capital cost of ``consumer``'s own storage (falls back to ``pi_shared``)."""
        if not self.pi_i_fx:
            return self.pi_shared_fx
        return self.pi_i_fx[consumer]

    def capital_costs_fx(self, n: int) -> tuple[int, ...]:
        if not self.pi_i_fx:
            return (self.pi_shared_fx,) * n
        if len(self.pi_i_fx) != n:
            raise DimensionMismatch(
                f"tariff has {len(self.pi_i_fx)} per-consumer capital costs, expected {n}"
            )
        return self.pi_i_fx

    def with_shared(self, pi_shared) -> "Tariff":
        return Tariff(self.pi_h_fx, self.pi_l_fx, to_fixed(pi_shared), self.pi_i_fx)


def arbitrage_price(t: Tariff) -> Fraction:
    """Peak minus off-peak price, in cents/kWh."""
    return from_fixed(t.pi_delta_fx)


def arbitrage_constant(t: Tariff, capital_cost=None) -> Fraction:
    """Critical fractile ``(pi_delta - capital_cost) / pi_delta`` as an exact fraction.

    ``capital_cost`` defaults to the tariff's shared capital cost.

    Raises
    ------
    ViabilityError
        If ``capital_cost`` exceeds the arbitrage price.
    """
    cap_fx = t.pi_shared_fx if capital_cost is None else to_fixed(capital_cost)
    return arbitrage_constant_fx(t, cap_fx)


def arbitrage_constant_fx(t: Tariff, capital_cost_fx: int) -> Fraction:
    delta = t.pi_delta_fx
    if capital_cost_fx < 0:
        raise ValidationError("capital cost must be nonnegative")
    if capital_cost_fx > delta:
        raise ViabilityError(
            f"capital cost {from_fixed(capital_cost_fx)} exceeds arbitrage price {from_fixed(delta)}"
        )
    return Fraction(delta - capital_cost_fx, delta)


CASE_STUDY_TARIFF = dict(pi_h=55, pi_l=20, pi_shared=15)
"""Case-study prices in cents/kWh."""

__all__ = [
    "Tariff",
    "arbitrage_price",
    "arbitrage_constant",
    "arbitrage_constant_fx",
    "CASE_STUDY_TARIFF",
]

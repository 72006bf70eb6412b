from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from storeshare.errors import ValidationError, ViabilityError
from storeshare.tariff import Tariff, arbitrage_constant, arbitrage_price


@pytest.mark.parametrize("pi_h,pi_l,expected", [(55, 20, 35), (1, 0.0001, F(9999, 10000)), (30, 29, 1)])
def test_arbitrage_price(pi_h, pi_l, expected):
    assert arbitrage_price(Tariff.from_prices(pi_h, pi_l)) == expected


def test_arbitrage_price_unit_case():
    # off-peak must be strictly positive, so the unit case is checked on the margin directly
    t = Tariff.from_prices(2, 1)
    assert arbitrage_price(t) == 1


def test_arbitrage_constant_case_study():
    t = Tariff.from_prices(55, 20, 15)
    g = arbitrage_constant(t, 15)
    assert g == F(20, 35)
    assert float(g) == pytest.approx(0.571428, abs=1e-6)


def test_arbitrage_constant_boundaries():
    t = Tariff.from_prices(55, 20)
    assert arbitrage_constant(t, 0) == 1
    assert arbitrage_constant(t, 35) == 0


def test_arbitrage_constant_rejects_unviable_capital_cost():
    with pytest.raises(ViabilityError):
        arbitrage_constant(Tariff.from_prices(55, 20), 35.0001)


@given(st.integers(0, 350_000), st.integers(0, 350_000))
def test_arbitrage_constant_monotone(a, b):
    t = Tariff.from_prices(55, 20)
    lo, hi = sorted((a, b))
    assert arbitrage_constant(t, F(lo, 10_000)) >= arbitrage_constant(t, F(hi, 10_000))


@pytest.mark.parametrize("kwargs", [
    dict(pi_h=20, pi_l=55),
    dict(pi_h=20, pi_l=20),
    dict(pi_h=20, pi_l=0),
    dict(pi_h=55, pi_l=20, pi_shared=-1),
])
def test_invalid_tariff_rejected(kwargs):
    with pytest.raises(ValidationError):
        Tariff.from_prices(**kwargs)


def test_viability_enforced_at_construction():
    with pytest.raises(ViabilityError):
        Tariff.from_prices(55, 20, 40)
    with pytest.raises(ViabilityError):
        Tariff.from_prices(55, 20, 15, pi_i=[10, 36])


def test_all_problems_listed():
    with pytest.raises(ValidationError) as e:
        Tariff.from_prices(10, 20, -1)
    assert len(e.value.problems) == 2


def test_per_consumer_costs_default_to_shared():
    t = Tariff.from_prices(55, 20, 15)
    assert t.capital_costs_fx(3) == (t.pi_shared_fx,) * 3
    t2 = Tariff.from_prices(55, 20, 15, pi_i={0: 10, 1: 12})
    assert [F(p, 10_000) for p in t2.capital_costs_fx(2)] == [10, 12]


def test_tariff_is_immutable():
    t = Tariff.from_prices(55, 20, 15)
    with pytest.raises(AttributeError):
        t.pi_h_fx = 1

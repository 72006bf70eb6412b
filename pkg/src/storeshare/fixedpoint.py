"""Fixed-point helpers.

Energies (kWh) and prices (cents/kWh) are quantized to ``DIGITS`` decimal
places and carried as integers scaled by ``SCALE``.  A price times an energy
is therefore an integer scaled by ``SCALE**2``.  Averages are kept as exact
:class:`fractions.Fraction` values so that every budget-balance identity
holds with equality.
"""
from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from numbers import Rational

DIGITS = 4
SCALE = 10**DIGITS
MONEY_SCALE = SCALE * SCALE

_QUANTUM = Decimal(1).scaleb(-DIGITS)


def to_fixed(value) -> int:
    """Quantize a real number to an integer number of ``1/SCALE`` units.

    Floats go through their shortest ``repr`` so that ``0.1`` maps to 1000
    rather than to the binary expansion.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a quantity")
    if isinstance(value, int):
        return value * SCALE
    if isinstance(value, Rational):
        scaled = Fraction(value) * SCALE
        q = round(scaled)
        return int(q)
    if isinstance(value, Decimal):
        d = value
    else:
        d = Decimal(repr(float(value)))
    return int((d.quantize(_QUANTUM, rounding=ROUND_HALF_EVEN) * SCALE).to_integral_value())


def from_fixed(value, scale: int = SCALE) -> Fraction:
    """Inverse of :func:`to_fixed` (exact)."""
    return Fraction(value) / scale


def money(value) -> Fraction:
    """Convert an integer or fraction at ``MONEY_SCALE`` to cents."""
    return Fraction(value) / MONEY_SCALE


def as_fraction(value) -> Fraction:
    """Exact fraction of a real number after fixed-point quantization."""
    if isinstance(value, Fraction):
        return value
    return Fraction(to_fixed(value), SCALE)

"""Coalitions as bitmasks, and the subset enumerations used by the game checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import DimensionMismatch, EmptyCoalition


@dataclass(frozen=True, order=True)
class Coalition:
    """A set of consumer indices encoded as a bitmask (bit ``i`` = consumer ``i``)."""

    mask: int

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("coalition mask must be nonnegative")

    @classmethod
    def of(cls, members: Iterable[int]) -> "Coalition":
        mask = 0
        for i in members:
            if i < 0:
                raise ValueError(f"negative consumer index {i}")
            mask |= 1 << i
        return cls(mask)

    @classmethod
    def grand(cls, n: int) -> "Coalition":
        return cls((1 << n) - 1)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(members_of(self.mask))

    def __iter__(self) -> Iterator[int]:
        return members_of(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __or__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask | other.mask)

    def isdisjoint(self, other: "Coalition") -> bool:
        return not self.mask & other.mask

    def require_within(self, n: int) -> "Coalition":
        if self.mask == 0:
            raise EmptyCoalition("coalition has no members")
        if self.mask >> n:
            raise DimensionMismatch(f"coalition {self.members} is not a subset of 0..{n - 1}")
        return self

    def __repr__(self):
        return f"Coalition({set(self.members) or '{}'})"


def as_coalition(s) -> Coalition:
    """Accept a Coalition, a bitmask int, or an iterable of indices."""
    if isinstance(s, Coalition):
        return s
    if isinstance(s, int):
        return Coalition(s)
    return Coalition.of(s)


def members_of(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def nonempty_masks(n: int) -> range:
    return range(1, 1 << n)


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, including ``mask`` and 0, in decreasing order."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def disjoint_pairs(n: int) -> Iterator[tuple[int, int]]:
    """Ordered pairs ``(S, T)`` of disjoint nonempty coalitions.

    Walks the submasks of the complement of each ``S``; there are
    ``3**n - 2 * 2**n + 1`` such pairs.
    """
    full = (1 << n) - 1
    for s in range(1, full + 1):
        for t in submasks(full ^ s):
            if t:
                yield s, t


def count_disjoint_pairs(n: int) -> int:
    return 3**n - 2 * 2**n + 1

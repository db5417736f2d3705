"""The grading group Z^d, its dual torus T^d and the duality pairing."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


class GroupIndex(tuple):
    """An element of Z^d. Hashable, ordered lexicographically, added componentwise."""

    def __new__(cls, coords: Iterable[int] | int):
        if isinstance(coords, (int, np.integer)):
            coords = (coords,)
        coords = tuple(int(c) for c in coords)
        if len(coords) < 1:
            raise ValueError("a grading index needs at least one coordinate")
        return super().__new__(cls, coords)

    @property
    def d(self) -> int:
        return len(self)

    def __add__(self, other):
        other = as_index(other)
        _check_dims(self, other)
        return GroupIndex(a + b for a, b in zip(self, other))

    __radd__ = __add__

    def __neg__(self):
        return GroupIndex(-a for a in self)

    def __sub__(self, other):
        return self + (-as_index(other))

    def __mul__(self, k):
        # integer scaling, not tuple repetition
        return GroupIndex(int(k) * a for a in self)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self)

    def max_abs(self) -> int:
        return max(abs(a) for a in self)

    def __repr__(self):
        if len(self) == 1:
            return f"GroupIndex({self[0]})"
        return f"GroupIndex({tuple(self)})"


def as_index(t) -> GroupIndex:
    return t if isinstance(t, GroupIndex) else GroupIndex(t)


def zero_index(d: int) -> GroupIndex:
    return GroupIndex((0,) * d)


class TorusPoint(tuple):
    """A point of T^d in additive coordinates, each reduced into [0, 1)."""

    def __new__(cls, coords: Iterable[float] | float):
        if isinstance(coords, (int, float, np.floating, np.integer)):
            coords = (coords,)
        reduced = []
        for c in coords:
            c = float(c)
            r = c - math.floor(c)
            # floor can land exactly on 1.0 for tiny negative inputs
            reduced.append(0.0 if r >= 1.0 else r)
        if not reduced:
            raise ValueError("a torus point needs at least one coordinate")
        return super().__new__(cls, reduced)

    @property
    def d(self) -> int:
        return len(self)

    def __add__(self, other):
        other = other if isinstance(other, TorusPoint) else TorusPoint(other)
        _check_dims(self, other)
        return TorusPoint(a + b for a, b in zip(self, other))

    def __neg__(self):
        return TorusPoint(-a for a in self)


def _check_dims(a, b):
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def pairing(x: TorusPoint, t: GroupIndex) -> complex:
    """Return <x, t> = exp(2 pi i x.t)."""
    x = x if isinstance(x, TorusPoint) else TorusPoint(x)
    t = as_index(t)
    _check_dims(x, t)
    # the integer t_j lets us reduce each product mod 1 before exponentiating
    phase = 0.0
    for xj, tj in zip(x, t):
        p = xj * tj
        phase += p - math.floor(p)
    return complex(np.exp(2j * np.pi * phase))

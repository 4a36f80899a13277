"""Exact Boxplus algebra on rationals and rational vectors.

The flat n-ary Boxplus of a multiset keeps only the entries whose value is
not balanced by an equal number of opposite entries, then returns the
surviving entry of largest magnitude with the sign that outnumbers the
other.  It is not associative, so it must always be evaluated on the whole
multiset at once.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch

Scalar = Fraction
Vector = tuple  # tuple[Fraction, ...]

LOWER = "lower"
UPPER = "upper"

_LITERAL = re.compile(r"[+-]?\d+(/[+-]?\d+)?")


def as_scalar(value) -> Fraction:
    """Coerce an int, Fraction or "p/q" string into a Fraction."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _LITERAL.fullmatch(text):
            raise ValueError(f"not a rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def as_vector(values: Iterable) -> Vector:
    return tuple(as_scalar(v) for v in values)


def format_scalar(x: Fraction) -> str:
    return str(x)


def _positions(values: Sequence, index) -> list[int]:
    if index is None:
        return list(range(len(values)))
    positions = sorted(set(index))
    for i in positions:
        if not 0 <= i < len(values):
            raise IndexError(f"index {i} outside multiset of size {len(values)}")
    return positions


def occurrence_balance(values: Sequence, alpha, index=None) -> int:
    """Count of entries equal to alpha minus count of entries equal to -alpha."""
    pos = _positions(values, index)
    alpha = as_scalar(alpha)
    return sum((values[i] == alpha) - (values[i] == -alpha) for i in pos)


def residual_index_set(values: Sequence, index=None) -> frozenset[int]:
    """Positions whose value is not cancelled by opposite entries."""
    pos = _positions(values, index)
    counts = Counter(values[i] for i in pos)
    return frozenset(i for i in pos if counts[values[i]] != counts[-values[i]])


def nary_boxplus(values: Sequence, index=None) -> Fraction:
    """Flat Boxplus of the multiset ``values`` (optionally restricted to ``index``)."""
    pos = _positions(values, index)
    counts = Counter(as_scalar(values[i]) for i in pos)
    top = None
    for value, count in counts.items():
        if value != 0 and count != counts[-value]:
            magnitude = abs(value)
            if top is None or magnitude > top:
                top = magnitude
    if top is None:
        return Fraction(0)
    return top if counts[top] > counts[-top] else -top


def binary_boxplus(a, b) -> Fraction:
    a, b = as_scalar(a), as_scalar(b)
    if abs(a) > abs(b):
        return a
    if abs(a) < abs(b):
        return b
    return (a + b) / 2


def _common_dim(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        raise ValueError("need at least one vector")
    dim = len(vectors[0])
    for v in vectors:
        if len(v) != dim:
            raise DimensionMismatch(f"vectors of dimension {dim} and {len(v)}")
    return dim


def boxplus_vectors(vectors: Sequence[Sequence]) -> Vector:
    """Componentwise flat Boxplus of a family of vectors."""
    dim = _common_dim(vectors)
    return tuple(nary_boxplus([v[i] for v in vectors]) for i in range(dim))


def scale(t, v: Sequence) -> Vector:
    t = as_scalar(t)
    return tuple(t * x for x in v)


def smile_chain(values: Sequence, direction: str = LOWER) -> Fraction:
    """Lower or upper regularised Boxplus of a non-empty multiset.

    The lower chain pits the largest positive entry against the most
    negative one and keeps the larger magnitude, preferring the negative
    entry on a tie.  The upper chain prefers the positive one.
    """
    if not values:
        raise ValueError("smile chain of an empty multiset")
    if direction not in (LOWER, UPPER):
        raise ValueError(f"direction must be {LOWER!r} or {UPPER!r}")
    values = [as_scalar(v) for v in values]
    positive = max((v for v in values if v > 0), default=Fraction(0))
    negative = min((v for v in values if v < 0), default=Fraction(0))
    if positive > -negative:
        return positive
    if positive < -negative:
        return negative
    return negative if direction == LOWER else positive


def _products(a: Sequence, x: Sequence) -> list[Fraction]:
    if len(a) != len(x):
        raise DimensionMismatch(f"vectors of dimension {len(a)} and {len(x)}")
    return [as_scalar(ai) * as_scalar(xi) for ai, xi in zip(a, x)]


def inner_infty(a: Sequence, x: Sequence) -> Fraction:
    """Limit inner product: flat Boxplus of the coordinate products."""
    return nary_boxplus(_products(a, x))


def inner_infty_regularized(a: Sequence, x: Sequence, direction: str = LOWER) -> Fraction:
    return smile_chain(_products(a, x), direction)


def norm_infty(x: Sequence) -> Fraction:
    return max((abs(as_scalar(v)) for v in x), default=Fraction(0))


@dataclass(frozen=True)
class SymmetricForm:
    """The map x -> <a, x> together with its two regularisations."""

    a: Vector

    def __post_init__(self):
        object.__setattr__(self, "a", as_vector(self.a))

    def __call__(self, x: Sequence) -> Fraction:
        return inner_infty(self.a, x)

    def lower(self, x: Sequence) -> Fraction:
        return inner_infty_regularized(self.a, x, LOWER)

    def upper(self, x: Sequence) -> Fraction:
        return inner_infty_regularized(self.a, x, UPPER)

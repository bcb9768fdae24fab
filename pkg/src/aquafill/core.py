"""Exact rationals, load vectors, the majorization preorder and the harmonic map.

Everything here is exact: rationals are :class:`fractions.Fraction` and no
operation ever rounds. Majorization is tie-sensitive, so a single rounding
error would be enough to turn ``EQUIVALENT`` into ``INCOMPARABLE``.
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction
from itertools import accumulate
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

import numpy as np

from .errors import UnequalLength, UnequalSums, ValidationError

Rational = Fraction

_RATIO_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")
_DECIMAL_RE = re.compile(r"^\s*([+-]?)(\d+)(?:\.(\d{1,12}))?\s*$")
MAX_DECIMAL_DIGITS = 12


def to_rational(value) -> Fraction:
    """Coerce ``value`` to an exact :class:`Fraction`.

    Accepts integers, rationals and strings in either ``"p/q"`` form or as a
    decimal literal with at most 12 fractional digits. Floats are refused
    because their binary expansion is almost never what the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    m = _RATIO_RE.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ValidationError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    m = _DECIMAL_RE.match(text)
    if m:
        sign, whole, frac = m.groups()
        frac = frac or ""
        value = Fraction(int(whole + frac), 10 ** len(frac))
        return -value if sign == "-" else value
    raise ValidationError(
        f"not a rational literal: {text!r} (expected 'p/q' or a decimal with "
        f"at most {MAX_DECIMAL_DIGITS} fractional digits)"
    )


def format_rational(value: Fraction) -> str:
    """Canonical string form: ``"p/q"``, or ``"p"`` for integers."""
    return str(Fraction(value))


class LoadVector(tuple):
    """Immutable vector of nonnegative exact rationals.

    Positions are 0-based in Python, but offline node ``i`` of a request
    sequence (1-based) lives at ``vec[i - 1]``; use :meth:`at` for 1-based
    access.
    """

    __slots__ = ()

    def __new__(cls, entries: Iterable = ()):
        values = tuple(to_rational(v) for v in entries)
        if not values:
            raise ValidationError("load vectors need at least one entry")
        for v in values:
            if v < 0:
                raise ValidationError(f"negative load entry {v}")
        return super().__new__(cls, values)

    @classmethod
    def zeros(cls, n: int) -> "LoadVector":
        return cls([0] * n)

    @property
    def n(self) -> int:
        return len(self)

    def at(self, i: int) -> Fraction:
        return self[i - 1]

    def total(self) -> Fraction:
        return sum(self, Fraction(0))

    def descending(self) -> tuple:
        return tuple(sorted(self, reverse=True))

    def ascending(self) -> tuple:
        return tuple(sorted(self))

    def prefix_sums(self) -> tuple:
        return tuple(accumulate(self))

    def __add__(self, other):
        if isinstance(other, tuple) and len(other) == len(self):
            return LoadVector(a + b for a, b in zip(self, other))
        return NotImplemented

    def to_json(self) -> list:
        return [format_rational(v) for v in self]

    def to_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self], dtype=float)

    def __repr__(self) -> str:
        return "LoadVector(" + ", ".join(format_rational(v) for v in self) + ")"


class Majorization(enum.Enum):
    EQUIVALENT = "equivalent"
    LEFT_MAJORIZES_RIGHT = "left-majorizes-right"
    RIGHT_MAJORIZES_LEFT = "right-majorizes-left"
    INCOMPARABLE = "incomparable"


def _as_vector(x) -> LoadVector:
    return x if isinstance(x, LoadVector) else LoadVector(x)


def compare_majorization(x, y) -> Majorization:
    """Compare two vectors of equal total under the majorization preorder.

    ``LEFT_MAJORIZES_RIGHT`` means ``x`` is the less equitable one, i.e. every
    prefix sum of ``x`` sorted in decreasing order is at least the matching
    prefix sum of ``y``.
    """
    x, y = _as_vector(x), _as_vector(y)
    if len(x) != len(y):
        raise UnequalLength(f"lengths differ: {len(x)} vs {len(y)}")
    if x.total() != y.total():
        raise UnequalSums(f"totals differ: {x.total()} vs {y.total()}")
    px = accumulate(x.descending())
    py = accumulate(y.descending())
    left = right = True
    for a, b in zip(px, py):
        if a < b:
            left = False
        elif a > b:
            right = False
    if left and right:
        return Majorization.EQUIVALENT
    if left:
        return Majorization.LEFT_MAJORIZES_RIGHT
    if right:
        return Majorization.RIGHT_MAJORIZES_LEFT
    return Majorization.INCOMPARABLE


def majorized_by(x, y) -> bool:
    """True iff ``x`` is majorized by ``y`` (``x`` at least as equitable)."""
    return compare_majorization(x, y) in (
        Majorization.RIGHT_MAJORIZES_LEFT,
        Majorization.EQUIVALENT,
    )


def equivalent(x, y) -> bool:
    """Same multiset of entries; defined even when totals differ."""
    return sorted(_as_vector(x)) == sorted(_as_vector(y))


def karamata_value(x, gamma) -> Fraction:
    """Sum of ``max(x(i) - gamma, 0)`` over all entries."""
    gamma = to_rational(gamma)
    if gamma < 0:
        raise ValidationError("threshold must be nonnegative")
    return sum((v - gamma for v in _as_vector(x) if v > gamma), Fraction(0))


def karamata_majorizes(x, y) -> bool:
    """Majorization test through thresholding functions.

    Both sides are piecewise linear in the threshold with breakpoints at entry
    values, so checking the union of entries (plus 0) is sufficient.
    """
    x, y = _as_vector(x), _as_vector(y)
    if len(x) != len(y):
        raise UnequalLength(f"lengths differ: {len(x)} vs {len(y)}")
    if x.total() != y.total():
        raise UnequalSums(f"totals differ: {x.total()} vs {y.total()}")
    breakpoints = sorted(set(x) | set(y) | {Fraction(0)})
    return all(karamata_value(x, g) >= karamata_value(y, g) for g in breakpoints)


class HarmonicMatrix:
    """Lower-triangular ``H(i, j) = 1/(n - j + 1)`` for ``i >= j`` (1-based)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValidationError("harmonic matrix needs n >= 1")
        self.n = n

    def entry(self, i: int, j: int) -> Fraction:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError((i, j))
        return Fraction(1, self.n - j + 1) if i >= j else Fraction(0)

    def rows(self) -> list:
        return [[self.entry(i, j) for j in range(1, self.n + 1)]
                for i in range(1, self.n + 1)]

    def as_array(self) -> np.ndarray:
        n = self.n
        cols = 1.0 / (n - np.arange(n))
        return np.tril(np.ones((n, n))) * cols[np.newaxis, :]

    def __repr__(self) -> str:
        return f"HarmonicMatrix(n={self.n})"


def apply_harmonic(H: HarmonicMatrix, z) -> LoadVector:
    """Exact product ``H z`` computed as a running sum."""
    z = _as_vector(z)
    if len(z) != H.n:
        raise UnequalLength(f"vector of length {len(z)} for H of size {H.n}")
    n = H.n
    out, running = [], Fraction(0)
    for j, value in enumerate(z, start=1):
        running += value / (n - j + 1)
        out.append(running)
    return LoadVector(out)


def harmonic_number(k: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def permute(vec: Sequence, order: Sequence[int]) -> LoadVector:
    """Entries of ``vec`` listed in ``order`` (1-based node labels)."""
    return LoadVector(vec[i - 1] for i in order)

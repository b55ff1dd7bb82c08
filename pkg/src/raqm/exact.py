"""Exact rationals, rational angles, quadratic surds and the Niven table.

Rationals are plain :class:`fractions.Fraction` values. Angles are stored
in turns (fractions of a full revolution), so ``RationalAngle(1/4)`` is a
right angle and no value ever carries a factor of pi.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Optional, Union

from .errors import MixedRadicands, NegativeInput, SquareFreeBoundExceeded

Rational = Fraction
RationalLike = Union[int, Fraction, str]

DEFAULT_FACTOR_BOUND = 10**6

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: they would smuggle binary rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    """ASCII ``p/q`` in lowest terms; integers keep the ``/1``."""
    value = as_rational(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RationalAngle:
    """An angle of ``turns * 2*pi`` radians, normalized into [0, 1) turns."""

    turns: Fraction

    def __post_init__(self):
        object.__setattr__(self, "turns", as_rational(self.turns) % 1)

    @classmethod
    def from_degrees(cls, degrees: RationalLike) -> "RationalAngle":
        return cls(as_rational(degrees) / 360)

    @property
    def degrees(self) -> Fraction:
        return self.turns * 360

    @property
    def radians(self) -> float:
        return float(self.turns) * 2 * math.pi

    def __add__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(self.turns + other.turns)

    def __sub__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(self.turns - other.turns)

    def __neg__(self) -> "RationalAngle":
        return RationalAngle(-self.turns)

    def scaled(self, k: int) -> "RationalAngle":
        return RationalAngle(self.turns * k)

    def to_json(self) -> dict:
        return {"turns": format_rational(self.turns)}

    @classmethod
    def from_json(cls, data: dict) -> "RationalAngle":
        return cls(parse_rational(data["turns"]))

    def __str__(self):
        return f"{format_rational(self.turns)} turn"


def normalize_angle(turns: RationalLike) -> RationalAngle:
    return RationalAngle(as_rational(turns))


# ---------------------------------------------------------------------------
# Niven's theorem: the only rational-turn angles with rational cosine.

NIVEN_COSINES = {
    Fraction(0): Fraction(1),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(1, 4): Fraction(0),
    Fraction(1, 3): Fraction(-1, 2),
    Fraction(1, 2): Fraction(-1),
    Fraction(2, 3): Fraction(-1, 2),
    Fraction(3, 4): Fraction(0),
    Fraction(5, 6): Fraction(1, 2),
}

NIVEN_ANGLES = tuple(RationalAngle(t) for t in sorted(NIVEN_COSINES))


@dataclass(frozen=True)
class NivenVerdict:
    is_rational_cosine: bool
    cosine_value: Optional[Fraction] = None

    def __post_init__(self):
        if self.is_rational_cosine != (self.cosine_value is not None):
            raise ValueError("cosine_value must be present exactly when rational")


def niven_classify(angle: RationalAngle) -> NivenVerdict:
    if not isinstance(angle, RationalAngle):
        angle = RationalAngle(as_rational(angle))
    cos = NIVEN_COSINES.get(angle.turns)
    if cos is None:
        return NivenVerdict(False)
    return NivenVerdict(True, cos)


def is_niven_angle(angle: RationalAngle) -> bool:
    return angle.turns in NIVEN_COSINES


def exact_cos_squared(angle: RationalAngle) -> Optional[Fraction]:
    """cos^2 of a rational angle when rational, else None.

    cos^2(x) = (1 + cos 2x)/2, so this holds exactly when 2x is a Niven angle.
    """
    doubled = niven_classify(angle.scaled(2))
    if not doubled.is_rational_cosine:
        return None
    return (1 + doubled.cosine_value) / 2


def cos_sign(angle: RationalAngle) -> int:
    """Sign of cos(angle) read off the quadrant; 0 on the vertical axis."""
    t = angle.turns
    if t == Fraction(1, 4) or t == Fraction(3, 4):
        return 0
    if Fraction(1, 4) < t < Fraction(3, 4):
        return -1
    return 1


# ---------------------------------------------------------------------------
# Square roots and square-free parts.


def square_free_decompose(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> tuple[int, int]:
    """Split ``n >= 1`` as ``f*f*s`` with ``s`` square-free; return ``(f, s)``.

    Trial division runs up to ``bound``. A leftover cofactor is accepted when
    it is provably prime (below ``bound**2``) or a perfect square of such.
    """
    if n < 1:
        raise ValueError("square_free_decompose needs n >= 1")
    f, s = 1, 1
    m = n
    p = 2
    while p * p <= m:
        if p > bound:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            f *= p ** (e // 2)
            if e % 2:
                s *= p
        p += 1 if p == 2 else 2
    if m > 1:
        r = math.isqrt(m)
        if r * r == m and r < bound * bound:
            # r has no prime factor <= bound and r < bound**2, so r is prime
            f *= r
        elif m < bound * bound or p * p > m:
            s *= m
        else:
            raise SquareFreeBoundExceeded(
                f"cofactor {m} of {n} is not resolvable by trial division up to {bound}"
            )
    return f, s


def _isqrt_exact(n: int) -> Optional[int]:
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt(r: RationalLike) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    r = as_rational(r)
    if r < 0:
        raise NegativeInput(f"square root of negative rational {r}")
    num = _isqrt_exact(r.numerator)
    if num is None:
        return None
    den = _isqrt_exact(r.denominator)
    if den is None:
        return None
    return Fraction(num, den)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticSurd:
    """The exact real number ``a + b*sqrt(d)``.

    Construction normalizes: ``d`` is reduced to its square-free part and a
    rational value always ends up with ``b == 0`` and ``d == 1``.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        a = as_rational(self.a)
        b = as_rational(self.b)
        d = int(self.d)
        if d < 0:
            raise NegativeInput("radicand must be non-negative")
        if d == 0:
            b = Fraction(0)
            d = 1
        elif b != 0:
            f, d = square_free_decompose(d)
            b *= f
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def sqrt(cls, r: RationalLike) -> "QuadraticSurd":
        """sqrt(r) for rational ``r >= 0`` as ``(1/q)*sqrt(p*q)``."""
        r = as_rational(r)
        if r < 0:
            raise NegativeInput(f"square root of negative rational {r}")
        return cls(0, Fraction(1, r.denominator), r.numerator * r.denominator)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_rational(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def sign(self) -> int:
        """Exact sign, decided without floating point."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa if sa else sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d
        n = self.norm()
        if n == 0:
            return 0
        return sa if n > 0 else sb

    def _coerce(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            return other
        return QuadraticSurd(as_rational(other))

    def _common_d(self, other: "QuadraticSurd") -> int:
        if self.b == 0:
            return other.d
        if other.b == 0 or other.d == self.d:
            return self.d
        raise MixedRadicands(f"sqrt({self.d}) and sqrt({other.d}) do not mix")

    def __add__(self, other):
        other = self._coerce(other)
        d = self._common_d(other)
        return QuadraticSurd(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        d = self._common_d(other)
        return QuadraticSurd(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero surd")
        c = self.conjugate()
        return QuadraticSurd(c.a / n, c.b / n, c.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __str__(self):
        if self.b == 0:
            return format_rational(self.a)
        return f"{format_rational(self.a)} + {format_rational(self.b)}*sqrt({self.d})"


def surd_mul(x: QuadraticSurd, y: QuadraticSurd) -> QuadraticSurd:
    return x * y

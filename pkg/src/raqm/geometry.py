"""Which measurement bases can be defined at the same time.

Everything here reduces to one exact question about a spherical triangle:
given two rational side-cosines and a rational-turn angle between them, is
the cosine of the third side rational? By the cosine rule

    cos(AC) = cos(AB) cos(BC) + sin(AB) sin(BC) cos(phi_B)

and the first term is rational, so the question is whether
``sqrt(r) * cos(phi_B)`` is rational with ``r = (1 - cos^2 AB)(1 - cos^2 BC)``.
That needs ``cos^2(phi_B)`` rational (a Niven condition on ``2 * phi_B``) and
then ``r * cos^2(phi_B)`` to be a rational square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional

from .errors import DomainError
from .exact import (
    QuadraticSurd,
    RationalAngle,
    as_rational,
    cos_sign,
    exact_cos_squared,
    format_rational,
    niven_classify,
    rational_sqrt,
)


class Obstruction(str, Enum):
    NON_NIVEN_ANGLE = "NonNivenAngle"
    NON_SQUARE_PRODUCT = "NonSquareProduct"


@dataclass(frozen=True)
class TriangleSpec:
    cos_AB: Fraction
    cos_BC: Fraction
    phi_B: RationalAngle

    def __post_init__(self):
        a = as_rational(self.cos_AB)
        c = as_rational(self.cos_BC)
        if abs(a) > 1 or abs(c) > 1:
            raise DomainError(f"side cosines must lie in [-1, 1], got {a} and {c}")
        phi = self.phi_B if isinstance(self.phi_B, RationalAngle) else RationalAngle(self.phi_B)
        object.__setattr__(self, "cos_AB", a)
        object.__setattr__(self, "cos_BC", c)
        object.__setattr__(self, "phi_B", phi)


@dataclass(frozen=True)
class DefinednessVerdict:
    third_side_rational: bool
    cos_AC: Optional[Fraction] = None
    obstruction: Optional[Obstruction] = None

    def __post_init__(self):
        if self.third_side_rational != (self.cos_AC is not None):
            raise ValueError("cos_AC must be present exactly when the side is rational")
        if self.third_side_rational == (self.obstruction is not None):
            raise ValueError("an obstruction is reported exactly when the side is irrational")

    @property
    def defined(self) -> bool:
        return self.third_side_rational

    def to_json(self) -> dict:
        return {
            "defined": self.third_side_rational,
            "cos_AC": None if self.cos_AC is None else format_rational(self.cos_AC),
            "obstruction": None if self.obstruction is None else self.obstruction.value,
        }


def third_side_cosine(t: TriangleSpec) -> DefinednessVerdict:
    a, c = t.cos_AB, t.cos_BC
    base = a * c
    if abs(a) == 1 or abs(c) == 1:
        # a zero-length (or antipodal) side: the sine term vanishes
        return DefinednessVerdict(True, base)
    s = exact_cos_squared(t.phi_B)
    if s is None:
        return DefinednessVerdict(False, None, Obstruction.NON_NIVEN_ANGLE)
    r = (1 - a * a) * (1 - c * c)
    root = rational_sqrt(r * s)
    if root is None:
        return DefinednessVerdict(False, None, Obstruction.NON_SQUARE_PRODUCT)
    return DefinednessVerdict(True, base + cos_sign(t.phi_B) * root)


def third_side_exact(t: TriangleSpec) -> Optional[QuadraticSurd]:
    """cos(AC) as an exact surd, or None when cos^2(phi_B) is irrational."""
    a, c = t.cos_AB, t.cos_BC
    s = exact_cos_squared(t.phi_B)
    if abs(a) == 1 or abs(c) == 1:
        return QuadraticSurd(a * c)
    if s is None:
        return None
    r = (1 - a * a) * (1 - c * c)
    return a * c + cos_sign(t.phi_B) * QuadraticSurd.sqrt(r * s)


def swap_counterfactual_defined(cos_AB, cos_BC, phi_B) -> DefinednessVerdict:
    """Is the world with the last two Stern-Gerlach devices swapped well defined?

    It is exactly when cos(AC) comes out rational.
    """
    return third_side_cosine(TriangleSpec(cos_AB, cos_BC, phi_B))


def bell_counterfactuals_defined(cos_AB, cos_AC, phi_A) -> DefinednessVerdict:
    """Definedness of cos(BC) for a triangle spanned at vertex A.

    The returned ``cos_AC`` field carries the third side, here cos(BC).
    """
    return third_side_cosine(TriangleSpec(cos_AB, cos_AC, phi_A))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    L: int
    nominal: RationalAngle
    window: Fraction
    phases: List[int]
    doubly_rational_phases: List[int]

    @property
    def total(self) -> int:
        return len(self.phases)

    @property
    def doubly_rational(self) -> int:
        return len(self.doubly_rational_phases)

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "nominal": self.nominal.to_json(),
            "window": format_rational(self.window),
            "census": {"total": self.total, "doubly_rational": self.doubly_rational},
            "doubly_rational_phases": [
                RationalAngle(Fraction(k, self.L)).to_json() for k in self.doubly_rational_phases
            ],
        }


def grid_phases_near(L: int, nominal: RationalAngle, window: Fraction) -> List[int]:
    """Grid indices k with circular distance |k/L - nominal| <= window (turns)."""
    window = as_rational(window)
    if window >= Fraction(1, 2):
        return list(range(L))
    lo = math.ceil((nominal.turns - window) * L)
    hi = math.floor((nominal.turns + window) * L)
    return sorted({k % L for k in range(lo, hi + 1)})


def complementarity_census(L: int, nominal_phi: RationalAngle, window) -> CensusReport:
    """Count grid phases near ``nominal_phi`` and those with rational cosine.

    Every grid phase 2*pi*k/L is a rational multiple of pi, so a phase is
    "doubly rational" (both the interferometric and which-way bases defined)
    exactly when its cosine is rational.
    """
    window = as_rational(window)
    if window <= 0:
        raise DomainError("window must be positive")
    if L < 1:
        raise DomainError("L must be at least 1")
    if not isinstance(nominal_phi, RationalAngle):
        nominal_phi = RationalAngle(as_rational(nominal_phi))
    phases = grid_phases_near(L, nominal_phi, window)
    doubly = [k for k in phases if niven_classify(RationalAngle(Fraction(k, L))).is_rational_cosine]
    return CensusReport(L, nominal_phi, window, phases, doubly)

"""Single-qubit states as length-L strings of +1/-1 bits.

A state with ``cos^2(theta/2) = m/L`` and phase ``2*pi*n/L`` is the block
string of ``m`` (+1)s followed by ``L - m`` (-1)s, cyclically rotated by
``n`` places. A hidden permutation ``xi`` then reorders the bits; the
measured bit is the one ``xi`` moves to the front.

Positions in :class:`MeasurementRecord` are 1-based, everything else is
0-based like ordinary Python sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import LengthMismatch, OutOfRange

DEFAULT_L = 3600
SEED_MASK = (1 << 64) - 1


def check_level(L: int, *, quaternionic: bool = False) -> int:
    """Validate a discretisation level."""
    if isinstance(L, bool) or int(L) != L or L < 1:
        raise OutOfRange(f"L must be a positive integer, got {L!r}")
    if quaternionic and L % 4:
        raise OutOfRange(f"quaternionic operators need 4 | L, got L={L}")
    return int(L)


@dataclass(frozen=True, eq=False)
class HiddenPermutation:
    """A permutation of the L bit positions.

    ``mapping[j]`` is where the bit at pre-permutation index ``j`` ends up.
    Seeded permutations come from numpy's PCG64 shuffle, so the same
    ``(seed, L)`` gives the same mapping in every process.
    """

    L: int
    seed: Optional[int] = None
    explicit: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        check_level(self.L)
        if self.seed is None and self.explicit is None:
            raise ValueError("need a seed or an explicit mapping")
        if self.seed is not None:
            if not 0 <= self.seed <= SEED_MASK:
                raise OutOfRange("xi seed must be an unsigned 64-bit integer")
        if self.explicit is not None:
            if sorted(self.explicit) != list(range(self.L)):
                raise ValueError("explicit mapping is not a permutation of 0..L-1")

    @classmethod
    def from_seed(cls, seed: int, L: int) -> "HiddenPermutation":
        return cls(L=L, seed=int(seed))

    @classmethod
    def from_mapping(cls, mapping: Iterable[int]) -> "HiddenPermutation":
        mapping = tuple(int(x) for x in mapping)
        return cls(L=len(mapping), explicit=mapping)

    @classmethod
    def identity(cls, L: int) -> "HiddenPermutation":
        return cls.from_mapping(range(L))

    @classmethod
    def measuring(cls, L: int, position: int) -> "HiddenPermutation":
        """A transposition that puts 1-based ``position`` at the front."""
        if not 1 <= position <= L:
            raise OutOfRange(f"position {position} outside 1..{L}")
        mapping = list(range(L))
        j = position - 1
        mapping[0], mapping[j] = mapping[j], mapping[0]
        return cls.from_mapping(mapping)

    @cached_property
    def mapping(self) -> np.ndarray:
        if self.explicit is not None:
            out = np.asarray(self.explicit, dtype=np.int64)
        else:
            out = np.random.default_rng(self.seed).permutation(self.L)
        out.setflags(write=False)
        return out

    @cached_property
    def measured_index(self) -> int:
        """0-based pre-permutation index sent to the front, i.e. xi^-1(0)."""
        return int(np.argmin(self.mapping))

    @property
    def measured_position(self) -> int:
        """M(xi) in 1..L."""
        return self.measured_index + 1

    def apply(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits)
        if len(bits) != self.L:
            raise LengthMismatch(f"string of length {len(bits)} vs permutation on {self.L}")
        out = np.empty_like(bits)
        out[self.mapping] = bits
        return out

    def inverse_apply(self, bits: np.ndarray) -> np.ndarray:
        return np.asarray(bits)[self.mapping]

    def __eq__(self, other):
        if not isinstance(other, HiddenPermutation):
            return NotImplemented
        return self.L == other.L and np.array_equal(self.mapping, other.mapping)

    def __hash__(self):
        return hash((self.L, self.mapping.tobytes()))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int8)
    a.setflags(write=False)
    return a


def block_string(L: int, m: int) -> np.ndarray:
    """m (+1)s followed by L-m (-1)s."""
    s = np.full(L, -1, dtype=np.int8)
    s[:m] = 1
    return s


def rotate(bits: Sequence[int], n: int) -> np.ndarray:
    """Cyclic rotation: the bit at index k moves to index (k + n) mod L."""
    return np.roll(np.asarray(bits, dtype=np.int8), n)


@dataclass(frozen=True, eq=False)
class BitStringState:
    """Canonical (pre-xi) bit string plus the hidden permutation acting on it."""

    bits: np.ndarray
    xi: HiddenPermutation
    basis_tag: str = "computational"

    def __post_init__(self):
        bits = _frozen(self.bits)
        if len(bits) != self.xi.L:
            raise LengthMismatch("bits and xi disagree on L")
        if not np.all(np.abs(bits) == 1):
            raise ValueError("bits must be +1 or -1")
        object.__setattr__(self, "bits", bits)

    @property
    def L(self) -> int:
        return len(self.bits)

    @property
    def m(self) -> int:
        return int(np.count_nonzero(self.bits == 1))

    @cached_property
    def ordered(self) -> np.ndarray:
        """The string after xi has been applied."""
        return _frozen(self.xi.apply(self.bits))

    def to_bitstring(self) -> str:
        """'1'/'0' text for the canonical string (-1 written as 0)."""
        return "".join("1" if b > 0 else "0" for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, BitStringState):
            return NotImplemented
        return (
            np.array_equal(self.bits, other.bits)
            and self.xi == other.xi
            and self.basis_tag == other.basis_tag
        )

    __hash__ = None


@dataclass(frozen=True)
class QubitSpec:
    """The (L, m, n, xi_seed) tuple that fully determines a seeded qubit."""

    L: int
    m: int
    n: int
    xi_seed: int

    def build(self) -> BitStringState:
        return make_qubit(self.L, self.m, self.n, HiddenPermutation.from_seed(self.xi_seed, self.L))

    def to_json(self) -> dict:
        return {"L": self.L, "m": self.m, "n": self.n, "xi_seed": self.xi_seed}

    @classmethod
    def from_json(cls, data: dict) -> "QubitSpec":
        return cls(int(data["L"]), int(data["m"]), int(data["n"]), int(data["xi_seed"]))


def bits_from_string(text: str) -> np.ndarray:
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"expected a non-empty string of 0/1 characters, got {text!r}")
    return _frozen(np.array([1 if c == "1" else -1 for c in text], dtype=np.int8))


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: int
    position: int


def make_qubit(L: int, m: int, n: int, xi: HiddenPermutation, basis_tag: str = "computational") -> BitStringState:
    L = check_level(L)
    if not 0 <= m <= L:
        raise OutOfRange(f"m={m} outside 0..{L}")
    if not 0 <= n < L:
        raise OutOfRange(f"n={n} outside 0..{L - 1}")
    if xi.L != L:
        raise LengthMismatch(f"xi acts on {xi.L} positions, state has {L}")
    return BitStringState(rotate(block_string(L, m), n), xi, basis_tag)


def measure(state: BitStringState) -> MeasurementRecord:
    j = state.xi.measured_index
    return MeasurementRecord(int(state.bits[j]), j + 1)


def rephase(state: BitStringState, n: int) -> BitStringState:
    """Rotate the canonical string by a further ``n`` places."""
    return BitStringState(rotate(state.bits, n % state.L), state.xi, state.basis_tag)


def derive_seeds(seed: int, count: int) -> np.ndarray:
    """``count`` independent 64-bit seeds spawned from one parent seed."""
    return np.random.SeedSequence(int(seed)).generate_state(count, dtype=np.uint64)


def sample_measured_indices(L: int, seeds: Iterable[int]) -> np.ndarray:
    """0-based M(xi) - 1 for each seed, identical to HiddenPermutation.from_seed."""
    return np.fromiter(
        (int(np.argmin(np.random.default_rng(int(s)).permutation(L))) for s in seeds),
        dtype=np.int64,
    )


@dataclass(frozen=True)
class BornFrequency:
    exact: Fraction
    empirical: float
    sample_count: int


def born_frequency(L: int, m: int, n: int = 0, *, sample_count: int, seed: int) -> BornFrequency:
    """Exact and sampled frequency of +1 outcomes for state (L, m, n)."""
    if sample_count < 1:
        raise OutOfRange("sample_count must be at least 1")
    bits = make_qubit(L, m, n, HiddenPermutation.identity(L)).bits
    exact = Fraction(int(np.count_nonzero(bits == 1)), L)
    idx = sample_measured_indices(L, derive_seeds(seed, sample_count))
    empirical = float(np.count_nonzero(bits[idx] == 1)) / sample_count
    return BornFrequency(exact, empirical, sample_count)


def equivalent_under_permutation(s1: BitStringState, s2: BitStringState) -> bool:
    if s1.L != s2.L:
        raise LengthMismatch(f"lengths {s1.L} and {s2.L} differ")
    return s1.m == s2.m

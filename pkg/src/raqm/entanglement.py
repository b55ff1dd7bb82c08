"""Two-qubit states as a pair of correlated bit strings sharing one xi."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import numpy as np

from .bitstring import (
    HiddenPermutation,
    _frozen,
    block_string,
    check_level,
    rotate,
    sample_measured_indices,
)
from .errors import GridIncompatible, LengthMismatch, OutOfRange
from .exact import as_rational, format_rational


@dataclass(frozen=True, eq=False)
class EntangledPair:
    """Canonical (pre-xi) strings for both parties and their common xi.

    ``params`` holds the three (m, n) pairs the strings were built from:
    Alice's string, Bob's sub-block under Alice's +1 bits, and Bob's
    sub-block under Alice's -1 bits.
    """

    alice_bits: np.ndarray
    bob_bits: np.ndarray
    xi: HiddenPermutation
    params: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        a = _frozen(self.alice_bits)
        b = _frozen(self.bob_bits)
        if len(a) != len(b) or len(a) != self.xi.L:
            raise LengthMismatch("both strings and xi must share one L")
        object.__setattr__(self, "alice_bits", a)
        object.__setattr__(self, "bob_bits", b)

    @property
    def L(self) -> int:
        return len(self.alice_bits)

    @property
    def alice_ordered(self) -> np.ndarray:
        return self.xi.apply(self.alice_bits)

    @property
    def bob_ordered(self) -> np.ndarray:
        return self.xi.apply(self.bob_bits)

    def __eq__(self, other):
        if not isinstance(other, EntangledPair):
            return NotImplemented
        return (
            np.array_equal(self.alice_bits, other.alice_bits)
            and np.array_equal(self.bob_bits, other.bob_bits)
            and self.xi == other.xi
        )

    __hash__ = None


def make_pair(L, alice, bob_under_plus, bob_under_minus, xi: HiddenPermutation) -> EntangledPair:
    """General two-qubit pair from three ``(m, n)`` pairs.

    ``alice = (m1, n1)``: Alice holds m1 (+1)s. ``bob_under_plus = (m2, n2)``:
    of the m1 positions under Alice's (+1)s, Bob holds m2 (+1)s, rotated
    n2 places within that sub-block. ``bob_under_minus = (m3, n3)`` does the
    same for the L - m1 positions under Alice's (-1)s. ``n1`` finally
    rotates both strings together, which keeps the sub-block alignment.
    """
    L = check_level(L)
    (m1, n1), (m2, n2), (m3, n3) = alice, bob_under_plus, bob_under_minus
    if not 0 <= m1 <= L:
        raise OutOfRange(f"m1={m1} outside 0..{L}")
    if not 0 <= m2 <= m1 or not 0 <= m3 <= L - m1:
        raise OutOfRange("sub-block counts exceed sub-block sizes")
    if not 0 <= n1 < L:
        raise OutOfRange(f"n1={n1} outside 0..{L - 1}")
    for n, size in ((n2, m1), (n3, L - m1)):
        if n < 0 or (size and n >= size) or (not size and n):
            raise OutOfRange("sub-block rotation outside the sub-block")
    if xi.L != L:
        raise LengthMismatch(f"xi acts on {xi.L} positions, pair has {L}")
    alice_bits = block_string(L, m1)
    first = rotate(block_string(m1, m2), n2) if m1 else np.empty(0, dtype=np.int8)
    second = rotate(block_string(L - m1, m3), n3) if L - m1 else np.empty(0, dtype=np.int8)
    bob_bits = np.concatenate([first, second])
    return EntangledPair(
        rotate(alice_bits, n1), rotate(bob_bits, n1), xi, ((m1, n1), (m2, n2), (m3, n3))
    )


def singlet_block_sizes(L: int, cos_theta) -> Tuple[int, int]:
    """Bob's (+1) counts under Alice's (+1) and (-1) halves.

    Under Alice's (+1) half a fraction sin^2(theta/2) = (1 - c)/2 of Bob's
    bits are +1, under the (-1) half a fraction cos^2(theta/2) = (1 + c)/2.
    """
    c = as_rational(cos_theta)
    if abs(c) > 1:
        raise GridIncompatible(f"|cos theta| = {abs(c)} > 1")
    if L % 2:
        raise GridIncompatible(f"singlet needs even L, got {L}")
    half = L // 2
    under_plus = half * (1 - c) / 2
    under_minus = half * (1 + c) / 2
    if under_plus.denominator != 1 or under_minus.denominator != 1:
        raise GridIncompatible(
            f"cos theta = {format_rational(c)} is not representable at L={L}"
        )
    return int(under_plus), int(under_minus)


def is_grid_compatible(L: int, cos_theta) -> bool:
    try:
        singlet_block_sizes(L, cos_theta)
    except GridIncompatible:
        return False
    return True


def grid_cosines(L: int) -> list:
    """Every singlet-representable cosine at L: 1 - 4k/L for k = 0..L/2."""
    if L % 2:
        return []
    return [c for c in (1 - Fraction(4 * k, L) for k in range(L // 2 + 1)) if is_grid_compatible(L, c)]


@dataclass(frozen=True, eq=False)
class SingletPair:
    base: EntangledPair
    cos_theta: Fraction
    # True for the representation with the two parties' string patterns exchanged
    exchanged: bool = False

    @property
    def L(self) -> int:
        return self.base.L

    @property
    def xi(self) -> HiddenPermutation:
        return self.base.xi

    @property
    def alice_bits(self) -> np.ndarray:
        return self.base.alice_bits

    @property
    def bob_bits(self) -> np.ndarray:
        return self.base.bob_bits

    def __eq__(self, other):
        if not isinstance(other, SingletPair):
            return NotImplemented
        return self.base == other.base and self.cos_theta == other.cos_theta and self.exchanged == other.exchanged

    __hash__ = None

    def to_json(self) -> dict:
        out = {"L": self.L, "m": self.L // 2, "n": 0, "cos_theta": format_rational(self.cos_theta)}
        if self.xi.seed is not None:
            out["xi_seed"] = self.xi.seed
        else:
            out["xi_perm"] = [int(x) for x in self.xi.mapping]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SingletPair":
        L = int(data["L"])
        if "xi_seed" in data:
            xi = HiddenPermutation.from_seed(int(data["xi_seed"]), L)
        else:
            xi = HiddenPermutation.from_mapping(data["xi_perm"])
        return make_singlet(L, as_rational(data["cos_theta"]), xi)


def _singlet_strings(L: int, cos_theta) -> Tuple[np.ndarray, np.ndarray]:
    plus, minus = singlet_block_sizes(L, cos_theta)
    half = L // 2
    alice = block_string(L, half)
    bob = np.concatenate([block_string(half, plus), block_string(half, minus)])
    return alice, bob


def make_singlet(L: int, cos_theta, xi: HiddenPermutation) -> SingletPair:
    L = check_level(L)
    c = as_rational(cos_theta)
    plus, minus = singlet_block_sizes(L, c)
    base = make_pair(L, (L // 2, 0), (plus, 0), (minus, 0), xi)
    return SingletPair(base, c)


def joint_measure(pair: SingletPair) -> Tuple[int, int]:
    j = pair.xi.measured_index
    return int(pair.alice_bits[j]), int(pair.bob_bits[j])


def exact_correlation(pair) -> Fraction:
    base = pair.base if isinstance(pair, SingletPair) else pair
    total = int(np.dot(base.alice_bits.astype(np.int64), base.bob_bits.astype(np.int64)))
    return Fraction(total, base.L)


@dataclass(frozen=True)
class LocalityReport:
    """What changed on the far side when one party re-aimed."""

    far_string_unchanged: bool
    far_outcome_unchanged: bool
    far_outcome: int
    near_outcome_before: int
    near_outcome_after: int

    @property
    def local(self) -> bool:
        return self.far_string_unchanged and self.far_outcome_unchanged


def bob_counterfactual_swap(pair: SingletPair, new_cos) -> Tuple[SingletPair, LocalityReport]:
    """Rebuild Bob's string for a new setting; Alice's side must not move."""
    if pair.exchanged:
        raise ValueError("Bob-side swaps act on the standard representation")
    new = make_singlet(pair.L, new_cos, pair.xi)
    a0, b0 = joint_measure(pair)
    a1, b1 = joint_measure(new)
    report = LocalityReport(
        far_string_unchanged=bool(np.array_equal(pair.alice_bits, new.alice_bits)),
        far_outcome_unchanged=a0 == a1,
        far_outcome=a1,
        near_outcome_before=b0,
        near_outcome_after=b1,
    )
    return new, report


def exchange_permutation(pair: SingletPair) -> np.ndarray:
    """Position map pi that swaps the two canonical strings position-wise.

    pi sends each position where (alice, bob) = (+1, -1) to one where it is
    (-1, +1) and vice versa; matching pairs stay put. Both classes have
    L/2 - (L/4)(1 - c) members, so such a map always exists.
    """
    a, b = pair.alice_bits, pair.bob_bits
    pi = np.arange(pair.L)
    pm = np.flatnonzero((a == 1) & (b == -1))
    mp = np.flatnonzero((a == -1) & (b == 1))
    assert len(pm) == len(mp)
    pi[pm] = mp
    pi[mp] = pm
    return pi


def exchanged_form(pair: SingletPair) -> SingletPair:
    """The same physical pair with Alice carrying the block pattern.

    Returns canonical strings (alice = Bob's old pattern, bob = the half
    string) under xi' = xi o pi^-1, so that the xi'-ordered strings equal
    the xi-ordered strings of ``pair`` bit for bit.
    """
    if pair.exchanged:
        raise ValueError("pair is already in the exchanged form")
    pi = exchange_permutation(pair)
    pi_inv = np.empty_like(pi)
    pi_inv[pi] = np.arange(pair.L)
    xi_prime = HiddenPermutation.from_mapping(pair.xi.mapping[pi_inv])
    base = EntangledPair(pair.bob_bits, pair.alice_bits, xi_prime, pair.base.params)
    return SingletPair(base, pair.cos_theta, exchanged=True)


def alice_counterfactual_swap(pair: SingletPair, new_cos) -> Tuple[SingletPair, LocalityReport]:
    """Re-aim Alice through the exchanged representation; Bob must not move."""
    primed = pair if pair.exchanged else exchanged_form(pair)
    bob_half, pattern = _singlet_strings(pair.L, new_cos)
    base = EntangledPair(pattern, bob_half, primed.xi, primed.base.params)
    new = SingletPair(base, as_rational(new_cos), exchanged=True)
    a0, b0 = joint_measure(pair)
    a1, b1 = joint_measure(new)
    report = LocalityReport(
        far_string_unchanged=bool(np.array_equal(primed.bob_bits, new.bob_bits)),
        far_outcome_unchanged=b0 == b1,
        far_outcome=b1,
        near_outcome_before=a0,
        near_outcome_after=a1,
    )
    return new, report


# ---------------------------------------------------------------------------


def outcomes_at(L: int, cos_theta, indices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Joint outcomes for a batch of 0-based measured indices, one singlet."""
    alice, bob = _singlet_strings(L, cos_theta)
    return alice[indices], bob[indices]


def sampled_correlation(L: int, cos_theta, seeds: Iterable[int], indices: Optional[np.ndarray] = None) -> float:
    """Mean of alice*bob over xi drawn from ``seeds``.

    ``indices`` may carry precomputed M(xi) - 1 values for those seeds.
    """
    if indices is None:
        indices = sample_measured_indices(L, seeds)
    a, b = outcomes_at(L, cos_theta, indices)
    return float(np.mean(a.astype(np.int64) * b))

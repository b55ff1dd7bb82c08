"""2-adic and 4-adic digit words, shift-map collapse and the p-adic distance.

Words are written most-significant digit first, as in ``10011010.``; the
shift map divides by the base and drops the fractional part, i.e. removes
the last digit. Distance is measured by agreement of leading digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from collections.abc import Sequence
from typing import List, Tuple

import numpy as np

from .errors import BaseMismatch, LengthMismatch

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class PadicWord:
    p: int
    digits: Tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"base must be at least 2, got {self.p}")
        digits = tuple(int(d) for d in self.digits)
        if any(not 0 <= d < self.p for d in digits):
            raise ValueError(f"digit out of range for base {self.p}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def parse(cls, text: str, p: int = 2) -> "PadicWord":
        text = text.strip().rstrip(".")
        if not text:
            raise ValueError("empty word")
        try:
            digits = [_DIGITS.index(c) for c in text.lower()]
        except ValueError:
            raise ValueError(f"malformed digit string {text!r}") from None
        return cls(p, tuple(digits))

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        return "".join(_DIGITS[d] for d in self.digits)

    @property
    def value(self) -> int:
        """The integer the word denotes (for the shift-map view)."""
        v = 0
        for d in self.digits:
            v = v * self.p + d
        return v

    def permuted(self, mapping: Sequence[int]) -> "PadicWord":
        """Move digit j to position mapping[j] (a hidden permutation)."""
        out = [0] * len(self)
        for j, target in enumerate(mapping):
            out[int(target)] = self.digits[j]
        return PadicWord(self.p, tuple(out))


def encode_2adic(bits: Sequence[int]) -> PadicWord:
    """+1 -> 1, -1 -> 0, order kept."""
    out = []
    for b in bits:
        if b == 1:
            out.append(1)
        elif b == -1:
            out.append(0)
        else:
            raise ValueError(f"bit {b!r} is not +1 or -1")
    return PadicWord(2, tuple(out))


def decode_2adic(word: PadicWord) -> np.ndarray:
    if word.p != 2:
        raise BaseMismatch(f"expected a 2-adic word, got base {word.p}")
    return np.array([1 if d else -1 for d in word.digits], dtype=np.int8)


def encode_4adic(pair, canonical: bool = False) -> PadicWord:
    """Digit ``2*alice + bob`` per position, bits read as 1/0.

    Uses the xi-ordered strings unless ``canonical`` is set.
    """
    if canonical:
        a, b = pair.alice_bits, pair.bob_bits
    else:
        a, b = pair.xi.apply(pair.alice_bits), pair.xi.apply(pair.bob_bits)
    return pair_to_4adic(encode_2adic(a), encode_2adic(b))


def pair_to_4adic(alice: PadicWord, bob: PadicWord) -> PadicWord:
    if alice.p != 2 or bob.p != 2:
        raise BaseMismatch("4-adic pairing takes two 2-adic words")
    if len(alice) != len(bob):
        raise LengthMismatch(f"lengths {len(alice)} and {len(bob)} differ")
    return PadicWord(4, tuple(2 * x + y for x, y in zip(alice.digits, bob.digits)))


def split_4adic(word: PadicWord) -> Tuple[PadicWord, PadicWord]:
    if word.p != 4:
        raise BaseMismatch(f"expected a 4-adic word, got base {word.p}")
    return (
        PadicWord(2, tuple(d >> 1 for d in word.digits)),
        PadicWord(2, tuple(d & 1 for d in word.digits)),
    )


class _Prefixes(Sequence):
    """Lazy view of every shift-map iterate; step i keeps len - i digits."""

    def __init__(self, word: PadicWord):
        self._word = word

    def __len__(self):
        return len(self._word)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        return PadicWord(self._word.p, self._word.digits[: n - i])


@dataclass(frozen=True)
class CollapseTrace:
    """Iterates of the shift map from the full word down to one digit."""

    initial: PadicWord

    @property
    def steps(self) -> Sequence[PadicWord]:
        return _Prefixes(self.initial)

    @property
    def step_count(self) -> int:
        return len(self.initial) - 1

    @property
    def final(self) -> PadicWord:
        return PadicWord(self.initial.p, self.initial.digits[:1])

    def dropped_digits(self) -> List[int]:
        """Digits removed by each step, in the order they were dropped."""
        return list(reversed(self.initial.digits[1:]))

    def reconstruct(self) -> PadicWord:
        digits = self.final.digits + tuple(reversed(self.dropped_digits()))
        return PadicWord(self.final.p, digits)

    def to_json(self) -> list:
        return [str(w) for w in self.steps]

    def csv_rows(self):
        for i, w in enumerate(self.steps):
            yield i, str(w), len(w)


def shift_step(word: PadicWord) -> PadicWord:
    """One application of the shift map: floor-divide by the base."""
    if len(word) <= 1:
        return word
    return PadicWord(word.p, word.digits[:-1])


def shift_collapse(word: PadicWord) -> CollapseTrace:
    """Iterate the shift map until a single digit is left."""
    if len(word) < 1:
        raise ValueError("cannot collapse an empty word")
    return CollapseTrace(word)


def padic_distance(x: PadicWord, y: PadicWord) -> Fraction:
    """p^-k where k counts agreeing leading digits; 0 for equal words."""
    if x.p != y.p:
        raise BaseMismatch(f"bases {x.p} and {y.p} differ")
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)} differ")
    for k, (a, b) in enumerate(zip(x.digits, y.digits)):
        if a != b:
            return Fraction(1, x.p**k)
    return Fraction(0)

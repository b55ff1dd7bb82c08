"""Complex and quaternionic units as signed permutations of bit strings.

An operator is stored as two index maps rather than a matrix:
``apply(op, s)[k] == op.sign[k] * s[op.target[k]]``. That is row ``k`` of
the corresponding matrix, which has a single entry ``sign[k]`` in column
``target[k]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadL, LengthMismatch, OutOfRange


def _frozen(a, dtype) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SignedPermutationOp:
    target: np.ndarray
    sign: np.ndarray

    def __post_init__(self):
        target = _frozen(self.target, np.int64)
        sign = _frozen(self.sign, np.int8)
        if target.shape != sign.shape or target.ndim != 1:
            raise LengthMismatch("target and sign must be 1-d and the same length")
        if not np.array_equal(np.sort(target), np.arange(len(target))):
            raise ValueError("target is not a bijection")
        if not np.all(np.abs(sign) == 1):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "sign", sign)

    @property
    def L(self) -> int:
        return len(self.target)

    def __call__(self, s):
        return apply(self, s)

    def __matmul__(self, other: "SignedPermutationOp") -> "SignedPermutationOp":
        return compose(self, other)

    def __neg__(self) -> "SignedPermutationOp":
        return SignedPermutationOp(self.target, -self.sign)

    def __eq__(self, other):
        if not isinstance(other, SignedPermutationOp):
            return NotImplemented
        return np.array_equal(self.target, other.target) and np.array_equal(self.sign, other.sign)

    def __hash__(self):
        return hash((self.target.tobytes(), self.sign.tobytes()))

    def to_matrix(self) -> np.ndarray:
        """Dense L x L matrix; for small L only."""
        M = np.zeros((self.L, self.L), dtype=np.int64)
        M[np.arange(self.L), self.target] = self.sign
        return M

    def to_json(self) -> dict:
        return {"L": self.L, "perm": [int(t) for t in self.target], "sign": [int(x) for x in self.sign]}

    @classmethod
    def from_json(cls, data: dict) -> "SignedPermutationOp":
        op = cls(data["perm"], data["sign"])
        if op.L != int(data["L"]):
            raise LengthMismatch("declared L does not match perm length")
        return op


def identity(L: int) -> SignedPermutationOp:
    return SignedPermutationOp(np.arange(L), np.ones(L))


def negation(L: int) -> SignedPermutationOp:
    return SignedPermutationOp(np.arange(L), -np.ones(L))


def apply(op: SignedPermutationOp, s: Sequence[int]) -> np.ndarray:
    s = np.asarray(s)
    if s.shape[0] != op.L:
        raise LengthMismatch(f"operator on {op.L} positions applied to length {s.shape[0]}")
    sign = op.sign if s.ndim == 1 else op.sign.reshape((-1,) + (1,) * (s.ndim - 1))
    return sign * s[op.target]


def compose(p: SignedPermutationOp, q: SignedPermutationOp) -> SignedPermutationOp:
    """The operator ``p @ q``: apply ``q`` first, then ``p``."""
    if p.L != q.L:
        raise LengthMismatch(f"cannot compose operators on {p.L} and {q.L} positions")
    return SignedPermutationOp(q.target[p.target], p.sign * q.sign[p.target])


def inverse(op: SignedPermutationOp) -> SignedPermutationOp:
    inv = np.empty_like(op.target)
    inv[op.target] = np.arange(op.L)
    return SignedPermutationOp(inv, op.sign[inv])


def power(op: SignedPermutationOp, n: int) -> SignedPermutationOp:
    if n < 0:
        return power(inverse(op), -n)
    result = identity(op.L)
    base = op
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def direct_sum(ops: Iterable[SignedPermutationOp]) -> SignedPermutationOp:
    targets, signs, offset = [], [], 0
    for op in ops:
        targets.append(op.target + offset)
        signs.append(op.sign)
        offset += op.L
    return SignedPermutationOp(np.concatenate(targets), np.concatenate(signs))


def unit_i() -> SignedPermutationOp:
    """The 2x2 unit i = [[0, 1], [-1, 0]]: {a1, a2} -> {a2, -a1}."""
    return SignedPermutationOp([1, 0], [1, -1])


def block_i(n: int) -> SignedPermutationOp:
    """Block-diagonal matrix of n/2 copies of the 2x2 unit i."""
    if n % 2:
        raise BadL(f"block of i units needs even size, got {n}")
    return direct_sum(unit_i() for _ in range(n // 2))


def _block_matrix(blocks: dict, nblocks: int, size: int) -> SignedPermutationOp:
    """Assemble a block-permutation operator from ``{(row, col): op}``."""
    target = np.empty(nblocks * size, dtype=np.int64)
    sign = np.empty(nblocks * size, dtype=np.int8)
    rows = set()
    for (r, c), op in blocks.items():
        if r in rows:
            raise ValueError("two blocks in one block-row")
        rows.add(r)
        target[r * size:(r + 1) * size] = op.target + c * size
        sign[r * size:(r + 1) * size] = op.sign
    if len(rows) != nblocks:
        raise ValueError("every block-row needs exactly one block")
    return SignedPermutationOp(target, sign)


def build_J(k: int, L: int) -> SignedPermutationOp:
    """Quaternionic unit J_k on length-L strings, 4 | L.

    With L split into four blocks of size b = L/4 and I the b x b
    block-diagonal matrix of i units::

        J1 = diag(I, I, -I, -I)
        J2 = [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]]
        J3 = [[0, 0, I, 0], [0, 0, 0, -I], [I, 0, 0, 0], [0, -I, 0, 0]]

    When b is odd, I cannot be built inside a single block. The operators
    are then assembled on two halves of size L/2 instead, with I' the
    half-size block of i units: J1 = diag(I', -I'), J2 = [[0, 1], [-1, 0]],
    J3 = [[0, I'], [I', 0]]. This is the same algebra and agrees with the
    four-block form for J1.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2 or 3, got {k}")
    if isinstance(L, bool) or L < 4 or L % 4:
        raise BadL(f"quaternionic units need 4 | L, got L={L}")
    b = L // 4
    if b % 2 == 0:
        I = block_i(b)
        one = identity(b)
        if k == 1:
            return direct_sum([I, I, -I, -I])
        if k == 2:
            return _block_matrix({(0, 2): one, (1, 3): -one, (2, 0): -one, (3, 1): one}, 4, b)
        return _block_matrix({(0, 2): I, (1, 3): -I, (2, 0): I, (3, 1): -I}, 4, b)
    h = L // 2
    I = block_i(h)
    one = identity(h)
    if k == 1:
        return direct_sum([I, -I])
    if k == 2:
        return _block_matrix({(0, 1): one, (1, 0): -one}, 2, h)
    return _block_matrix({(0, 1): I, (1, 0): I}, 2, h)


def zeta_power(n: int, L: int) -> SignedPermutationOp:
    """Cyclic rotation by n places (bit k moves to k + n), all signs +1."""
    if not 0 <= n < L:
        raise OutOfRange(f"n={n} outside 0..{L - 1}")
    return SignedPermutationOp((np.arange(L) - n) % L, np.ones(L))


def check_quaternion_relations(L: int) -> dict:
    """Verify the quaternion identities as operator equalities at this L."""
    J1, J2, J3 = (build_J(k, L) for k in (1, 2, 3))
    minus_one = negation(L)
    checks = {
        "J1^2 = -1": compose(J1, J1) == minus_one,
        "J2^2 = -1": compose(J2, J2) == minus_one,
        "J3^2 = -1": compose(J3, J3) == minus_one,
        "J1 J2 = J3": compose(J1, J2) == J3,
        "J2 J3 = J1": compose(J2, J3) == J1,
        "J3 J1 = J2": compose(J3, J1) == J2,
        "J2 J1 = -J3": compose(J2, J1) == -J3,
    }
    return {k: bool(v) for k, v in checks.items()}

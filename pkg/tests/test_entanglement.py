import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from raqm.bitstring import HiddenPermutation, derive_seeds
from raqm.entanglement import (
    EntangledPair,
    SingletPair,
    alice_counterfactual_swap,
    bob_counterfactual_swap,
    exact_correlation,
    exchanged_form,
    grid_cosines,
    is_grid_compatible,
    joint_measure,
    make_pair,
    make_singlet,
    sampled_correlation,
)
from raqm.errors import GridIncompatible, OutOfRange

F = Fraction


def signs(text):
    return [1 if c == "+" else -1 for c in text]


def test_singlet_examples():
    p = make_singlet(8, 1, HiddenPermutation.identity(8))
    assert p.alice_bits.tolist() == signs("++++----")
    assert p.bob_bits.tolist() == signs("----++++")
    p = make_singlet(8, 0, HiddenPermutation.identity(8))
    assert p.bob_bits.tolist() == signs("++--++--")
    with pytest.raises(GridIncompatible):
        make_singlet(12, F(1, 2), HiddenPermutation.identity(12))
    p = make_singlet(16, F(1, 2), HiddenPermutation.identity(16))
    assert int((p.bob_bits[:8] == 1).sum()) == 2
    assert int((p.bob_bits[8:] == 1).sum()) == 6


def test_correlation_examples():
    assert exact_correlation(make_singlet(8, 1, HiddenPermutation.identity(8))) == -1
    assert exact_correlation(make_singlet(8, 0, HiddenPermutation.identity(8))) == 0
    assert exact_correlation(make_singlet(16, F(1, 2), HiddenPermutation.identity(16))) == F(-1, 2)


@given(st.integers(1, 200).map(lambda h: 2 * h), st.data())
def test_correlation_law(L, data):
    c = data.draw(st.sampled_from(grid_cosines(L)))
    p = make_singlet(L, c, HiddenPermutation.identity(L))
    # direct summation over positions, independent of exact_correlation
    total = sum(int(a) * int(b) for a, b in zip(p.alice_bits, p.bob_bits))
    assert F(total, L) == -c == exact_correlation(p)


def test_grid_cosines():
    assert grid_cosines(8) == [1, F(1, 2), 0, F(-1, 2), -1]
    assert all(is_grid_compatible(3600, c) for c in grid_cosines(3600))
    assert not is_grid_compatible(3600, F(1, 7))


def test_perfect_anticorrelation_every_position():
    for L in (2, 4, 6, 64, 1000):
        p = make_singlet(L, 1, HiddenPermutation.identity(L))
        for pos in range(1, L + 1):
            q = SingletPair(EntangledPair(p.alice_bits, p.bob_bits, HiddenPermutation.measuring(L, pos)), p.cos_theta)
            a, b = joint_measure(q)
            assert a == -b


def test_joint_measure_deterministic():
    xi = HiddenPermutation.from_seed(99, 360)
    p = make_singlet(360, F(1, 3), xi)
    assert joint_measure(p) == joint_measure(make_singlet(360, F(1, 3), HiddenPermutation.from_seed(99, 360)))


def test_same_sign_rate_cos_zero():
    n = 100_000
    est = sampled_correlation(360, 0, derive_seeds(7, n))
    same = (1 + est) / 2
    assert abs(same - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_bob_swap_examples():
    for seed in range(50):
        xi = HiddenPermutation.from_seed(seed, 64)
        p = make_singlet(64, F(1, 2), xi)
        new, rep = bob_counterfactual_swap(p, 0)
        assert rep.local and np.array_equal(new.alice_bits, p.alice_bits)
    p = make_singlet(64, 0, HiddenPermutation.from_seed(1, 64))
    new, rep = bob_counterfactual_swap(p, 0)
    assert new == p


@given(st.integers(0, 2**32), st.data())
def test_exchanged_form_preserves_ordered_strings(seed, data):
    L = 48
    c = data.draw(st.sampled_from(grid_cosines(L)))
    p = make_singlet(L, c, HiddenPermutation.from_seed(seed, L))
    e = exchanged_form(p)
    assert np.array_equal(e.base.alice_ordered, p.base.alice_ordered)
    assert np.array_equal(e.base.bob_ordered, p.base.bob_ordered)
    assert joint_measure(e) == joint_measure(p)
    assert exact_correlation(e) == exact_correlation(p)


@given(st.integers(0, 2**32), st.data())
def test_alice_swap_is_local(seed, data):
    L = 48
    cs = grid_cosines(L)
    c0, c1 = data.draw(st.sampled_from(cs)), data.draw(st.sampled_from(cs))
    p = make_singlet(L, c0, HiddenPermutation.from_seed(seed, L))
    new, rep = alice_counterfactual_swap(p, c1)
    assert rep.local
    assert exact_correlation(new) == -c1


def test_json_round_trip():
    p = make_singlet(64, F(1, 2), HiddenPermutation.from_seed(5, 64))
    assert SingletPair.from_json(p.to_json()) == p
    q = make_singlet(8, 0, HiddenPermutation.from_mapping([3, 1, 2, 0, 4, 5, 7, 6]))
    assert SingletPair.from_json(q.to_json()) == q


def test_make_pair_general():
    xi = HiddenPermutation.identity(10)
    p = make_pair(10, (6, 0), (2, 1), (3, 0), xi)
    assert p.alice_bits.tolist() == [1] * 6 + [-1] * 4
    assert p.bob_bits.tolist() == [-1, 1, 1, -1, -1, -1, 1, 1, 1, -1]
    with pytest.raises(OutOfRange):
        make_pair(10, (6, 0), (7, 0), (0, 0), xi)

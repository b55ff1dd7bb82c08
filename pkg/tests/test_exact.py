import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from raqm.errors import MixedRadicands, NegativeInput, SquareFreeBoundExceeded
from raqm.exact import (
    QuadraticSurd,
    RationalAngle,
    cos_sign,
    exact_cos_squared,
    format_rational,
    is_niven_angle,
    niven_classify,
    normalize_angle,
    parse_rational,
    rational_sqrt,
    square_free_decompose,
    surd_mul,
)

F = Fraction


def minpoly_cosine(turns: Fraction):
    """Independent oracle: cos(2 pi p/q) is rational iff its minimal polynomial is linear."""
    x = sympy.Symbol("x")
    expr = sympy.cos(2 * sympy.pi * sympy.Rational(turns.numerator, turns.denominator))
    poly = sympy.minimal_polynomial(expr, x)
    if sympy.degree(poly, x) != 1:
        return None
    root = sympy.solve(poly, x)[0]
    return F(int(root.p), int(root.q))


@pytest.mark.parametrize("turns,expected", [(F(9, 8), F(1, 8)), (F(-1, 4), F(3, 4)), (F(1, 3), F(1, 3))])
def test_normalize_angle(turns, expected):
    assert normalize_angle(turns).turns == expected


def test_niven_examples():
    v = niven_classify(RationalAngle(F(1, 6)))
    assert v.is_rational_cosine and v.cosine_value == F(1, 2)
    v = niven_classify(RationalAngle(0))
    assert v.is_rational_cosine and v.cosine_value == 1
    v = niven_classify(RationalAngle(F(1, 5)))
    assert not v.is_rational_cosine and v.cosine_value is None


@pytest.mark.parametrize("q", range(1, 25))
def test_niven_matches_minimal_polynomial_small_q(q):
    for p in range(q):
        if math.gcd(p, q) != 1:
            continue
        t = F(p, q)
        v = niven_classify(RationalAngle(t))
        assert v.cosine_value == minpoly_cosine(t)


def test_niven_set_has_eight_angles():
    found = [F(p, q) for q in range(1, 61) for p in range(q) if math.gcd(p, q) == 1 and is_niven_angle(RationalAngle(F(p, q)))]
    assert sorted(found) == [0, F(1, 6), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(5, 6)]


@given(st.fractions(min_value=-10, max_value=10, max_denominator=400))
def test_cos_squared_matches_float(t):
    a = RationalAngle(t)
    s = exact_cos_squared(a)
    if s is not None:
        assert math.isclose(float(s), math.cos(a.radians) ** 2, abs_tol=1e-12)
        if s:
            assert cos_sign(a) == (1 if math.cos(a.radians) > 0 else -1)


def test_degrees_round_trip():
    assert RationalAngle.from_degrees(60) == RationalAngle(F(1, 6))
    assert RationalAngle(F(1, 3)).degrees == 120
    assert RationalAngle.from_json(RationalAngle(F(5, 7)).to_json()) == RationalAngle(F(5, 7))


@given(st.fractions(max_denominator=10**6))
def test_parse_format_round_trip(x):
    assert parse_rational(format_rational(x)) == x


@pytest.mark.parametrize("text", ["", "1/0", "abc", "1/2/3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


# --- surds and square roots --------------------------------------------------


def test_surd_mul_examples():
    r2 = QuadraticSurd(0, 1, 2)
    assert surd_mul(r2, r2) == QuadraticSurd(2)
    assert surd_mul(QuadraticSurd(1, 1, 5), QuadraticSurd(1, -1, 5)).to_rational() == -4
    x = QuadraticSurd(0, F(4, 5), 1)
    y = QuadraticSurd(0, F(12, 13), 1)
    assert surd_mul(x, y).to_rational() == F(48, 65)


def test_mixed_radicands():
    with pytest.raises(MixedRadicands):
        QuadraticSurd(0, 1, 2) * QuadraticSurd(0, 1, 3)
    with pytest.raises(MixedRadicands):
        QuadraticSurd(0, 1, 2) + QuadraticSurd(0, 1, 3)


def test_rational_sqrt_examples():
    assert rational_sqrt(F(9, 16)) == F(3, 4)
    assert rational_sqrt(F(1, 2)) is None
    assert rational_sqrt(F(64, 81)) == F(8, 9)
    assert rational_sqrt(0) == 0
    with pytest.raises(NegativeInput):
        rational_sqrt(F(-1, 4))


def test_rational_sqrt_brute_force():
    squares = {F(a, b) ** 2 for a in range(0, 101) for b in range(1, 101)}
    for num in range(0, 200):
        for den in range(1, 60):
            r = F(num, den)
            root = rational_sqrt(r)
            assert (root is not None) == (r in squares or _brute_is_square(r))
            if root is not None:
                assert root >= 0 and root * root == r


def _brute_is_square(r: Fraction) -> bool:
    a = math.isqrt(r.numerator)
    b = math.isqrt(r.denominator)
    return a * a == r.numerator and b * b == r.denominator


def test_square_free_decompose():
    assert square_free_decompose(72) == (6, 2)
    assert square_free_decompose(1) == (1, 1)
    with pytest.raises(SquareFreeBoundExceeded):
        square_free_decompose((10**9 + 7) ** 2 * 3 * (10**9 + 9), bound=1000)


surds = st.builds(
    QuadraticSurd,
    st.fractions(max_denominator=50, min_value=-20, max_value=20),
    st.fractions(max_denominator=50, min_value=-20, max_value=20),
    st.sampled_from([1, 2, 3, 5, 6, 7, 8, 12]),
)


def _same_d(d):
    q = st.fractions(max_denominator=30, min_value=-10, max_value=10)
    return st.builds(QuadraticSurd, q, q, st.just(d))


@given(st.sampled_from([2, 3, 5, 6, 7]).flatmap(lambda d: st.tuples(_same_d(d), _same_d(d), _same_d(d))))
def test_surd_field_laws(t):
    x, y, z = t
    assert (x * y) * z == x * (y * z)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x * x.conjugate() == QuadraticSurd(x.norm())


@given(surds)
def test_surd_float_and_sign(x):
    assert math.isclose(float(x), float(x.a) + float(x.b) * math.sqrt(x.d), abs_tol=1e-9)
    if x.sign() != 0:
        assert x.sign() == (1 if float(x) > 0 else -1)
        inv = x.inverse()
        assert x * inv == QuadraticSurd(1)


@given(st.fractions(min_value=0, max_value=1000, max_denominator=1000))
def test_surd_sqrt_squares_back(r):
    s = QuadraticSurd.sqrt(r)
    assert s * s == QuadraticSurd(r)
    assert s.is_rational == (rational_sqrt(r) is not None)

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dysl2.algebra import (
    HBAR,
    AlgebraError,
    ExpansionRegion,
    RatFun,
    ScalarPoly,
    Side,
    TruncatedLaurent,
    TruncationError,
    gbinom,
    laurent_expand,
    poly_gens,
    series_exp,
    series_shift,
)

u, v, h = poly_gens("u", "v", HBAR)
small = st.integers(min_value=-6, max_value=6)


def test_gbinom_matches_pascal_and_negative_upper():
    assert gbinom(5, 2) == 10
    assert gbinom(2, 3) == 0
    # binom(-1, j) = (-1)^j
    assert [gbinom(-1, j) for j in range(5)] == [1, -1, 1, -1, 1]
    assert gbinom(-3, 2) == 6
    assert gbinom(4, -1) == 0


@given(small, st.integers(min_value=1, max_value=6))
def test_gbinom_pascal_rule(a, j):
    assert gbinom(a + 1, j) == gbinom(a, j) + gbinom(a, j - 1)


def test_scalar_poly_arithmetic_and_substitution():
    p = (u - h) ** 2
    assert p == u * u - 2 * u * h + h * h
    assert p.subs(u=Fraction(1, 2)).evaluate({HBAR: 0}) == Fraction(1, 4)
    assert p.compose(u=u + h) == u * u
    assert p.derivative("u") == 2 * (u - h)
    assert (p * (u + h)).exact_div(u - h) == (u - h) * (u + h)


@given(small, small, small)
def test_scalar_poly_ring_axioms(a, b, c):
    x = a * u + b * h + c
    y = b * u - c * v + a
    z = c * h * u + 1
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x - x == 0


def test_ratfun_reduces_to_lowest_terms():
    r = RatFun((u - v) * (u + h), (u - v) * (u - h))
    assert r == RatFun(u + h, u - h)
    assert (r * RatFun(u - h, u + h)) == RatFun(1)
    assert RatFun(r) == r
    assert (r ** -1) == RatFun(u - h, u + h)


@given(small.filter(lambda x: x != 0), small)
def test_ratfun_field_inverse(a, b):
    r = RatFun(a * u + b * h, u - v + 1)
    assert r / r == RatFun(1)
    assert r - r == RatFun(0)


def test_one_over_u_minus_v_in_both_regions():
    r = RatFun(1, u - v)
    inf = laurent_expand(r, ExpansionRegion.at_infinity("u"), (-4, 0))
    # 1/(u - v) = sum_{n>=0} v^n u^{-n-1}
    for n in range(3):
        assert inf[-n - 1] == v ** n
    assert inf[0] == 0
    zero = laurent_expand(r, ExpansionRegion.at_zero("u"), (0, 3))
    # 1/(u - v) = -sum_{n>=0} u^n v^{-n-1}
    assert zero[0] == RatFun(-1, v)
    assert zero[2] == RatFun(-1, v ** 3)


def test_delta_function_is_difference_of_expansions():
    # coefficient u^a v^b of the two expansions differ by 1 exactly when a + b = -1
    r = RatFun(1, u - v)
    inf = laurent_expand(r, ExpansionRegion.at_infinity("u"), (-4, 3))
    zero = laurent_expand(r, ExpansionRegion.at_zero("u"), (-4, 3))
    for a in range(-4, 4):
        diff = RatFun(inf.coeffs.get(a, 0)) - RatFun(zero.coeffs.get(a, 0))
        # diff is a Laurent monomial in v of power -a-1
        expected = RatFun(v ** (-a - 1)) if a < 0 else RatFun(1, v ** (a + 1))
        assert diff == expected


def test_truncated_window_is_enforced():
    s = TruncatedLaurent("u", {-1: 1, -2: 3}, lo=-2)
    with pytest.raises(TruncationError):
        s[-3]
    assert s[5] == 0  # exact zero above the top at infinity


def test_product_window_rule():
    a = TruncatedLaurent("u", {0: 1, -1: 2}, lo=-3)
    b = TruncatedLaurent("u", {1: 1}, lo=-2)
    p = a * b
    # lo = max(lo_a + top_b, lo_b + top_a) = max(-3 + 1, -2 + 0)
    assert p.lo == -2
    assert p[1] == 1 and p[0] == 2


def test_shift_of_inverse_power():
    s = TruncatedLaurent("u", {-1: 1}, lo=-3)
    g = ScalarPoly.var("g", ("g",))
    out = series_shift(s, g)
    assert out[-1] == 1 and out[-2] == -g and out[-3] == g * g


def test_shift_of_polynomial_is_exact():
    g = ScalarPoly.var("g", ("g",))
    out = series_shift(TruncatedLaurent("u", {2: 1}), g)
    assert out[2] == 1 and out[1] == 2 * g and out[0] == g * g


def test_exp_of_inverse_power():
    g = ScalarPoly.var("g", ("g",))
    s = TruncatedLaurent("u", {-1: g}, lo=-2)
    e = series_exp(s)
    assert e[0] == 1 and e[-1] == g and e[-2] == g * g * Fraction(1, 2)
    with pytest.raises(AlgebraError):
        series_exp(TruncatedLaurent("u", {0: 1}, lo=-2))


def test_inverse_of_ratio():
    r = laurent_expand(RatFun(u, u - h), ExpansionRegion.at_infinity("u"), (-6, 0))
    inv = r.inverse()
    prod = r * inv
    for p in range(prod.lo, 1):
        assert prod[p] == (1 if p == 0 else 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=-3, max_value=3))
def test_expansion_matches_evaluation_far_away(a, b):
    # the at-infinity series of (u + b)/(u - a) sums to the function at large u
    r = RatFun(u + b, u - a)
    s = laurent_expand(r, ExpansionRegion.at_infinity("u"), (-30, 0))
    x = Fraction(1000)
    total = sum(Fraction(c.constant_value() if isinstance(c, ScalarPoly) else c) * x ** p
                for p, c in s.coeffs.items())
    exact = Fraction(x + b, x - a)
    assert abs(total - exact) < Fraction(1, 10 ** 40)


def test_side_enum_regions():
    assert ExpansionRegion.at_zero("u").side is Side.AT_ZERO
    assert ExpansionRegion.dominant("u").side is Side.AT_INFINITY

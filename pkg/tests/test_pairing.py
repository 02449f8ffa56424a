import pytest
from hypothesis import given, strategies as st

from dysl2.algebra import RatFun, gbinom
from dysl2 import pairing
from dysl2.pairing import (
    HB,
    TABLE,
    BinomialShiftedModes,
    hopf_spot_checks,
    pair_coproduct,
    pair_with_product,
    pairing_spotcheck,
    regenerate_from_generating_functions,
)


def test_table_values():
    assert TABLE.pair(("e", 0), ("f", -1)) == RatFun(-1) / HB
    assert TABLE.pair(("f", 2), ("e", -3)) == RatFun(-1) / HB
    assert TABLE.pair(("e", 1), ("f", -1)).is_zero()
    assert TABLE.pair(("h", 0), ("h", -1)) == RatFun(-2) / HB
    assert TABLE.pair(("h", 1), ("h", -1)) == RatFun(-2)
    assert TABLE.pair(("h", 2), ("h", -2)) == RatFun(-4)
    assert TABLE.pair(("e", 0), ("h", -1)).is_zero()
    assert TABLE.c_d() == RatFun(1) / HB


def test_table_rejects_wrong_halves():
    with pytest.raises(ValueError):
        TABLE.pair(("e", -1), ("f", -1))
    with pytest.raises(ValueError):
        TABLE.pair(("e", 0), ("f", 0))


@given(st.integers(min_value=0, max_value=6), st.integers(min_value=-7, max_value=-1))
def test_hh_pairing_is_binomial_in_hbar(k, l):
    val = TABLE.pair(("h", k), ("h", l))
    j = k + l + 1
    expected = RatFun(-2 * gbinom(k, -l - 1)) * HB ** (j - 1) if j >= 0 else RatFun(0)
    assert val == expected


def test_table_regenerated_from_generating_functions():
    res = regenerate_from_generating_functions(K=4)
    assert res.passed and res.trusted == 3 * 5 * 5 + 1


def test_regeneration_detects_wrong_sign(monkeypatch):
    class Flipped(type(TABLE)):
        def pair(self, a, b):
            v = super().pair(a, b)
            return v * (-1) if a[0] == "e" else v

    monkeypatch.setattr(pairing, "TABLE", Flipped())
    assert not regenerate_from_generating_functions(K=2).passed


def test_hopf_spot_checks():
    res = hopf_spot_checks()
    assert res.passed and res.trusted == 6 * 9
    nonzero = {(a, b1, b2): v for a, b1, b2, v in res.parameters["values"] if v != "0"}
    assert nonzero == {
        ("e1", "h-1", "f-1"): "(2)/(hbar)",
        ("f1", "e-1", "h-1"): "(2)/(hbar)",
        ("h1", "e-1", "f-1"): "(-2)/(hbar)",
        ("h1", "h-1", "h-1"): "(4)/(hbar)",
    }


def test_wrong_coproduct_fails_hopf_check(monkeypatch):
    original = pairing.coproduct_low

    def mutated(a):
        terms = original(a)
        if a == "e1":
            return [(c * (-1), l, r) if l and r else (c, l, r) for c, l, r in terms]
        return terms

    monkeypatch.setattr(pairing, "coproduct_low", mutated)
    assert not hopf_spot_checks().passed


def test_products_against_coproduct_directly():
    assert pair_with_product(("e", 1), ("h", -1), ("f", -1)) == pair_coproduct("e1", ("h", -1), ("f", -1))
    assert pair_with_product(("h", 0), ("e", -1), ("f", -1)).is_zero()


def test_pairing_spotcheck_merges_both_routes():
    res = pairing_spotcheck()
    assert res.passed and res.relation_id == "pairing"
    assert res.trusted == 76 + 54


def test_binomial_shifted_modes():
    assert BinomialShiftedModes(0).g(3) == {("f", 3): RatFun(1)}
    g = BinomialShiftedModes(1).g(2)
    assert g == {("f", 2): RatFun(1), ("f", 1): RatFun(2) * HB, ("f", 0): HB ** 2}
    with pytest.raises(ValueError):
        BinomialShiftedModes(1).g(-1)

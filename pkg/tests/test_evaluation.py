import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dysl2.algebra import HBAR
from dysl2.evaluation import (
    PERM,
    Mat,
    PoleError,
    cartan_product,
    check_ybe,
    coproduct_modes,
    delta_op,
    eval_generator,
    inverse_rho_scalar,
    rbar_h,
    reconstruct_universal_R,
    rho,
    symbols,
    verify_coproduct_hom_and_intertwine,
    verify_defining_modes_eval,
    ybe_sides,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=9)


def test_mode_relations_hold_on_evaluation_module():
    out = verify_defining_modes_eval(K=4)
    for rid, res in out.items():
        assert res.passed, (rid, res.failures[:2])
        assert res.trusted > 0


def test_wrong_sign_in_relation_is_caught():
    # rescaling f by -1 breaks [e_k, f_l] = h_{k+l}
    x, hbar = symbols("x", HBAR)
    from dysl2.evaluation import defining_relations

    def gen(f, k):
        g = eval_generator(f, k, x)
        return g.scale(-1) if f == "f" else g

    assert not defining_relations(gen, hbar, 2, ids=("e-f",))["e-f"].passed


def test_rbar_is_identity_at_infinity_and_permutation_at_zero():
    h = Fraction(1)
    assert rbar_h(Fraction(10 ** 9), h).max_abs() == pytest.approx(1, abs=1e-8)
    r0 = rbar_h(Fraction(0), h)
    assert r0 == PERM


@pytest.mark.parametrize("kind", ["pure", "mixed"])
def test_yang_baxter(kind):
    res = check_ybe(kind, points=20, seed=1)
    assert res.passed and res.trusted == 64 * 21


@settings(max_examples=25, deadline=None)
@given(rationals, rationals, rationals)
def test_ybe_at_hypothesis_points(x, y, z):
    h = Fraction(1, 3)
    if 0 in (x - y + h, x - z + h, y - z + h):
        return
    lhs, rhs = ybe_sides("pure", x, y, z, h)
    assert lhs == rhs


def test_ybe_fails_with_wrong_spectral_argument():
    x, y, z, hbar = symbols("x", "y", "z", HBAR)
    from dysl2.evaluation import _embed
    R12 = _embed(rbar_h(x - y, hbar), (0, 1))
    R13 = _embed(rbar_h(x - z, hbar), (0, 2))
    R23 = _embed(rbar_h(z - y, hbar), (1, 2))  # reversed argument
    assert R12 @ R13 @ R23 != R23 @ R13 @ R12


def test_coproduct_homomorphism_and_intertwining():
    out = verify_coproduct_hom_and_intertwine(K=2)
    for name, res in out.items():
        assert res.passed, (name, res.failures[:2])
    assert out["intertwine"].trusted == 16 * 3 * 5


def test_intertwining_needs_the_right_argument():
    x, y, hbar = symbols("x", "y", HBAR)
    gen = coproduct_modes(x, y, hbar, 1)
    op = delta_op(gen, x, y)
    R = rbar_h(y - x, hbar)
    bad = [R @ gen(f, k) - op(f, k) @ R for f in ("e", "f", "h") for k in (-1, 0, 1)]
    assert any(list(m.nonzero_entries()) for m in bad)


def test_rho_minus_anchor():
    assert abs(rho("-", 1.0) - 2 / math.pi) < 1e-14


def test_rho_plus_times_shifted_minus():
    # rho+(u) and rho-(-u) are reciprocal Gamma quotients
    for u in (0.37, 2.5, -3.3):
        assert rho("+", u) * rho("-", -u) == pytest.approx(1, rel=1e-12)


def test_rho_pole_guard():
    with pytest.raises(PoleError):
        rho("-", 0.0)
    with pytest.raises(PoleError):
        rho("+", 2.0)


def test_cartan_product_trivial_without_factors():
    d = cartan_product(1e12, 10)
    assert d == pytest.approx([1, 1, 1, 1], rel=1e-9)


@pytest.mark.parametrize("t", [0.7, 1.3])
def test_reconstruction_converges_to_rbar_over_rho(t):
    rec = reconstruct_universal_R(t, N=400, scalar=inverse_rho_scalar())
    assert rec.error < 5e-3
    assert 1.8 < rec.decay_ratio < 2.2
    assert rec.richardson_error < 1e-5


def test_reconstruction_does_not_match_rho_times_rbar():
    rec = reconstruct_universal_R(1.3, N=400)
    assert rec.error > 0.1

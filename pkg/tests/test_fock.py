from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from dysl2.algebra import HBAR, ScalarPoly
from dysl2.fock import (
    Cutoffs,
    FockError,
    FockState,
    FockVector,
    HPoly,
    apply_vertex,
    basis,
    heisenberg_act,
    hpoly_const,
    mode_coefficient,
    partitions,
    shift_conjugate,
    shift_image,
    vacuum,
)
from dysl2.representation import current_spec

U, HB = sp.symbols("u hbar")
X = sp.symbols("x1:8")


def one(state):
    return FockVector.basis_vector(state, hpoly_const(1))


# ---------------------------------------------------------------------------
# basis


def test_partition_counts():
    assert [len(partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert partitions(3) == ((1, 1, 1), (2, 1), (3,))


def test_basis_order_and_sector():
    states = basis(0, Cutoffs(e_max=2, m_window=(0, 2)))
    assert states[0] == vacuum(0)
    assert all(s.sector == 0 for s in states)
    assert [s.energy for s in states] == sorted(s.energy for s in states)
    assert len(states) == 2 * (1 + 1 + 2)


def test_state_normalizes_parts():
    assert FockState(0, (1, 2)) == FockState(0, (2, 1))
    assert FockState(0, (2, 1, 1)).energy == 4
    assert FockState(-3, ()).sector == 1


@given(st.integers(min_value=-5, max_value=5), st.lists(st.integers(min_value=1, max_value=4), max_size=4))
def test_multiplicity_round_trip(m, parts):
    s = FockState(m, tuple(parts))
    assert FockState.from_multiplicities(m, s.multiplicities()) == s


# ---------------------------------------------------------------------------
# Heisenberg action


def test_heisenberg_examples():
    v = one(vacuum(0))
    out = heisenberg_act(1, heisenberg_act(-1, v).vector).vector
    assert out == one(vacuum(0))
    charged = heisenberg_act("e^alpha", v).vector
    assert heisenberg_act("p", charged).vector == charged.scale(hpoly_const(2))
    assert heisenberg_act(2, v).vector.is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3),
       st.lists(st.integers(min_value=1, max_value=3), max_size=3), st.integers(min_value=-3, max_value=3))
def test_heisenberg_bracket(n, k, parts, m):
    # [a_n, a_{-k}] = n delta_{nk}
    v = one(FockState(m, tuple(parts)))
    ab = heisenberg_act(n, heisenberg_act(-k, v).vector).vector
    ba = heisenberg_act(-k, heisenberg_act(n, v).vector).vector
    expected = v.scale(hpoly_const(n)) if n == k else FockVector()
    assert ab - ba == expected


def test_creation_truncation_is_counted():
    res = heisenberg_act(-3, one(vacuum(0)), e_max=2)
    assert res.vector.is_zero() and res.truncation_events == 1


# ---------------------------------------------------------------------------
# vertex operators against a direct symbolic expansion


def oracle_image(family, state, e_max):
    """Expand the normal-ordered current on a monomial with sympy, graded by energy."""
    g = sp.Symbol("g")  # energy grading
    m = state.m
    if family == "e":
        c = lambda n: (U - HB) ** n + U ** n
        d = lambda n: -U ** (-n)
        weight, shift = U ** m, 2
    elif family == "f":
        c = lambda n: -((U + HB) ** n + U ** n)
        d = lambda n: U ** (-n)
        weight, shift = U ** (-m), -2
    elif family == "h-":
        c = lambda n: (U - HB) ** n - (U + HB) ** n
        d = lambda n: 0
        weight, shift = 1, 0
    else:
        raise ValueError(family)
    mono = sp.Integer(1)
    for p in state.parts:
        mono *= X[p - 1] + d(p)
    expo = sum(c(n) * X[n - 1] * g ** n / n for n in range(1, e_max + 1))
    creation = sp.series(sp.exp(expo), g, 0, e_max + 1).removeO()
    total = sp.expand(creation * mono.subs({X[i]: X[i] * g ** (i + 1) for i in range(7)}) * weight)
    out = {}
    poly = sp.Poly(total, g, *X[:e_max])
    for exps, coeff in poly.terms():
        energy = exps[0]
        if energy > e_max:
            continue
        parts = []
        for i, r in enumerate(exps[1:]):
            parts += [i + 1] * r
        key = FockState(m + shift, tuple(parts))
        out[key] = sp.expand(out.get(key, 0) + coeff)
    return {k: v for k, v in out.items() if v != 0}


def engine_image(family, state, e_max):
    img = apply_vertex(current_spec(family), state, Cutoffs(e_max=e_max))
    out = {}
    for s, tl in img.terms.items():
        expr = 0
        for p, c in tl.coeffs.items():
            if isinstance(c, ScalarPoly):
                c = c.evaluate({HBAR: HB})
            expr += sp.nsimplify(c) * U ** p if not isinstance(c, sp.Expr) else c * U ** p
        out[s] = sp.expand(expr)
    return {k: v for k, v in out.items() if v != 0}


@pytest.mark.parametrize("family", ["e", "f", "h-"])
@pytest.mark.parametrize("state", [vacuum(0), vacuum(1), FockState(-1, (1,)), FockState(2, (2, 1))])
def test_vertex_image_matches_symbolic_expansion(family, state):
    e_max = 3
    eng = engine_image(family, state, e_max)
    ref = oracle_image(family, state, e_max)
    assert set(eng) == set(ref)
    for s in ref:
        assert sp.expand(eng[s] - ref[s]) == 0, s


def test_h_minus_on_vacuum_first_order():
    img = apply_vertex(current_spec("h-"), vacuum(0), Cutoffs(e_max=1))
    assert img.terms[vacuum(0)][0] == 1
    coeff = img.terms[FockState(0, (1,))][0]
    assert coeff.evaluate({HBAR: 1}) == -2


def test_h_plus_on_vacuum_is_identity():
    img = apply_vertex(current_spec("h+", depth=4), vacuum(0), Cutoffs(e_max=3))
    assert list(img.terms) == [vacuum(0)]
    tl = img.terms[vacuum(0)]
    assert tl[0] == 1 and all(tl[p] == 0 for p in range(-4, 0))


def test_e_on_vacuum_first_order():
    img = apply_vertex(current_spec("e"), vacuum(0), Cutoffs(e_max=1))
    tl = img.terms[FockState(2, (1,))]
    assert tl[1] == 2 and tl[0].evaluate({HBAR: Fraction(1, 3)}) == Fraction(-1, 3)


def test_e_mode_minus_one_on_vacuum():
    img = apply_vertex(current_spec("e"), vacuum(0), Cutoffs(e_max=2))
    vec = mode_coefficient(img, -1)
    h = HPoly([0, 1])
    expected = {
        FockState(2, ()): HPoly([1]),
        FockState(2, (1,)): -h,
        FockState(2, (1, 1)): h * h / 2,
        FockState(2, (2,)): h * h / 2,
    }
    assert dict(vec.items()) == expected


def test_nonnegative_e_modes_kill_vacuum():
    img = apply_vertex(current_spec("e"), vacuum(0), Cutoffs(e_max=4))
    for k in range(4):
        assert mode_coefficient(img, k).is_zero()


def test_f_mode_minus_one_on_vacuum():
    img = apply_vertex(current_spec("f"), vacuum(0), Cutoffs(e_max=1))
    vec = mode_coefficient(img, -1)
    assert vec[FockState(-2, ())] == 1
    assert vec[FockState(-2, (1,))] == HPoly([0, -1])


def test_e_mode_minus_two_on_vacuum():
    img = apply_vertex(current_spec("e"), vacuum(0), Cutoffs(e_max=1))
    vec = mode_coefficient(img, -2)
    assert vec[FockState(2, (1,))] == 2


def test_numeric_specs_rejected_by_series_api():
    from dysl2.intertwiner import current_numeric_spec
    with pytest.raises(FockError):
        apply_vertex(current_numeric_spec("e", 4.0, 1.0), vacuum(0), Cutoffs(e_max=1))


# ---------------------------------------------------------------------------
# shift operator


def test_shift_conjugation_examples():
    terms = shift_conjugate(("a", -1), 3)
    assert [(t.coeff, t.power, t.generator) for t in terms] == [
        (1, 0, ("a", -1)), (1, 1, ("a", -2)), (1, 2, ("a", -3)), (1, 3, ("a", -4))]
    terms = shift_conjugate(("a", 1), 3)
    assert [(t.coeff, t.power, t.generator) for t in terms] == [(1, 0, ("a", 1)), (-1, 1, ("p",))]
    assert [(t.coeff, t.power, t.generator) for t in shift_conjugate(("p",), 3)] == [(1, 0, ("p",))]


def test_shift_fixes_vacuum_and_raises_energy():
    img = shift_image(vacuum(0), 3)
    assert img[0] == one(vacuum(0))
    assert all(img[j].is_zero() for j in (1, 2, 3))
    img = shift_image(FockState(1, (2,)), 2)
    for j, vec in img.items():
        assert all(s.energy == 2 + j for s, _ in vec.items())


def test_shift_of_charged_vacuum():
    # exp(m sum gamma^j a_{-j}/j)|m>, degree-2 part for m = 1: (a_{-1}^2/2 + a_{-2}/2)
    img = shift_image(vacuum(1), 2)
    half = hpoly_const(Fraction(1, 2))
    assert dict(img[2].items()) == {FockState(1, (1, 1)): half, FockState(1, (2,)): half}

import pytest

from dysl2.fock import Cutoffs, FockError, FockState, HPoly, vacuum
from dysl2.representation import (
    CATALOG,
    CurrentAlgebra,
    _relation,
    build_mode,
    exchange_relations,
    run_relation,
    verify_d_covariance,
    verify_ef_delta,
    verify_exchange,
    verify_shift_automorphism,
)

SMALL = Cutoffs(e_max=3, m_window=(-2, 2), u_window=(-4, 2))
MODES = range(-2, 3)


@pytest.fixture(scope="module")
def alg():
    return CurrentAlgebra(SMALL.e_max, 8)


@pytest.mark.parametrize("rel_id", ["ee", "ff", "h+e", "h-e", "h+f", "h-f", "h+h-", "hh"])
def test_exchange_relations_hold(rel_id, alg):
    for rel in exchange_relations()[rel_id]:
        res = verify_exchange(rel, SMALL, MODES, alg)
        assert res.passed, res.failures[:3]
        assert res.trusted > 0


def test_swapped_ratio_is_detected(alg):
    # e(u)e(v) with the inverse structure function must fail
    wrong = _relation("ee", "e", "e", lambda u, v, h, c: u - v - h, lambda u, v, h, c: u - v + h, "e(u)e(v)")
    res = verify_exchange(wrong, SMALL, MODES, alg)
    assert not res.passed and res.failures


@pytest.mark.parametrize("rel_id, A, B, num, den", [
    ("h+f", "h+", "f", lambda u, v, h, c: u - v - h - h * c, lambda u, v, h, c: u - v + h - h * c),
    ("h+h-", "h+", "h-", lambda u, v, h, c: (u - v + h) * (u - v - h - h * c),
     lambda u, v, h, c: (u - v - h) * (u - v + h - h * c)),
])
def test_central_charge_matters(rel_id, A, B, num, den, alg):
    # the level-one module does not satisfy the relations at c = 0
    wrong = _relation(rel_id, A, B, num, den, rel_id, c_value=0)
    assert not verify_exchange(wrong, SMALL, MODES, alg).passed


def test_ef_delta(alg):
    res = verify_ef_delta(SMALL, MODES, alg)
    assert res.passed and res.trusted > 100


def test_d_covariance(alg):
    res = verify_d_covariance(SMALL, 2, MODES, alg=alg)
    assert res.passed and res.trusted > 100


def test_shift_automorphism():
    res = verify_shift_automorphism(SMALL, degree=3, K=3)
    assert res.passed and res.trusted > 100


def test_shift_automorphism_detects_wrong_prescription(monkeypatch):
    import dysl2.representation as rep
    from dysl2.fock import GenTerm

    original = rep.shift_conjugate

    def flipped(target, degree):
        terms = original(target, degree)
        # drop the sign of the zero-mode correction
        return [GenTerm(-t.coeff, t.power, t.generator) if t.generator == ("p",) and t.power else t
                for t in terms]

    monkeypatch.setattr(rep, "shift_conjugate", flipped)
    assert not verify_shift_automorphism(SMALL, degree=2, K=2).passed


def test_mode_builder_conventions():
    cut = Cutoffs(e_max=2)
    assert build_mode("e", -1, cut).power == 0
    assert build_mode("h+", 2, cut).power == -2
    assert build_mode("h-", 1, cut).power == 1
    with pytest.raises(FockError):
        build_mode("h+", -1, cut)
    with pytest.raises(FockError):
        build_mode("x", 0, cut)


def test_h_plus_constant_term_is_identity():
    op = build_mode("h+", 0, Cutoffs(e_max=3))
    for s in (vacuum(0), FockState(0, (2, 1)), FockState(0, (1, 1, 1))):
        assert op.column(s) == {s: HPoly([1])}


def test_e_minus_two_on_vacuum():
    op = build_mode("e", -2, Cutoffs(e_max=2))
    col = op.column(vacuum(0))
    assert col[FockState(2, (1,))] == 2
    assert FockState(2, ()) not in col


def test_catalog_dispatch():
    assert set(CATALOG) >= {"ee", "ef-delta", "d-cov", "shift-auto"}
    assert run_relation("hh", Cutoffs(e_max=2), range(-1, 2)).passed
    with pytest.raises(KeyError):
        run_relation("zz", Cutoffs(e_max=2))

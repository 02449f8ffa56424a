"""Hopf pairing between the two halves of the double, on low-degree elements.

Modes ``x_k`` with ``k >= 0`` live in the upper half, ``k < 0`` in the lower
half.  Values are exact elements of ``Q(hbar)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .algebra import HBAR, ExpansionRegion, RatFun, gbinom, laurent_expand, poly_gens
from .representation import Residual

_u, _v, _v2, _h = poly_gens("u", "v", "w", HBAR)
HB = RatFun(_h)


def _hpow(j: int) -> RatFun:
    return HB ** j


@dataclass(frozen=True)
class PairingTable:
    """Mode pairings; every value is a rational function of hbar."""

    def pair(self, a: tuple[str, int], b: tuple[str, int]) -> RatFun:
        fa, k = a
        fb, l = b
        if k < 0 or l >= 0:
            raise ValueError("pairing is between a k >= 0 mode and an l < 0 mode")
        if (fa, fb) in (("e", "f"), ("f", "e")):
            return RatFun(-1) / HB if l == -k - 1 else RatFun(0)
        if (fa, fb) == ("h", "h"):
            j = k + l + 1
            b_ = gbinom(k, -l - 1)
            if j < 0 or b_ == 0:
                return RatFun(0)
            return RatFun(-2 * b_) / HB * _hpow(j)
        return RatFun(0)

    @staticmethod
    def c_d() -> RatFun:
        return RatFun(1) / HB

    def to_json(self, K: int = 3) -> dict:
        rows = []
        for fam_a, fam_b in (("e", "f"), ("f", "e"), ("h", "h")):
            for k in range(K + 1):
                for l in range(-K - 1, 0):
                    val = self.pair((fam_a, k), (fam_b, l))
                    if not val.is_zero():
                        rows.append([f"{fam_a}{k}", f"{fam_b}{l}", str(val)])
        return {"modes": rows, "c,d": str(self.c_d())}


TABLE = PairingTable()


def regenerate_from_generating_functions(K: int = 4) -> Residual:
    """Expand the closed-form pairings in ``|u| > |v|`` and compare with the table.

    ``<e+(u), f-(v)> = <f+(u), e-(v)> = 1/(hbar (u - v))``,
    ``<h+(u), h-(v)> = (u - v + hbar)/(u - v - hbar)``, with
    ``x+(u) = sum_{k>=0} x_k u^{-k-1}``, ``x-(v) = -sum_{l<0} x_l v^{-l-1}``,
    ``h+(u) = 1 + hbar sum h_k u^{-k-1}``, ``h-(v) = 1 - hbar sum h_l v^{-l-1}``.
    """
    res = Residual("pairing-table", parameters={"K": K})
    u, v = _u, _v
    closed = {
        ("e", "f"): RatFun(1, _h * (u - v)),
        ("f", "e"): RatFun(1, _h * (u - v)),
        ("h", "h"): RatFun(u - v + _h, u - v - _h),
    }
    for (fa, fb), r in closed.items():
        outer = laurent_expand(r, ExpansionRegion.at_infinity("u"), (-K - 1, 0))
        for k in range(K + 1):
            cu = outer.coeffs.get(-k - 1, 0)
            inner = laurent_expand(RatFun(cu) if not isinstance(cu, RatFun) else cu,
                                   ExpansionRegion.at_zero("v"), (0, K + 1)) if cu != 0 else None
            for l in range(-K - 1, 0):
                series = 0 if inner is None else inner.coeffs.get(-l - 1, 0)
                series = RatFun(series) if not isinstance(series, RatFun) else series
                # series coefficient = (sign factors) * <x_k, y_l>
                if fa == "h":
                    predicted = TABLE.pair((fa, k), (fb, l)) * (HB * (-HB))
                else:
                    predicted = TABLE.pair((fa, k), (fb, l)) * (-1)
                res.trusted += 1
                res.record((fa, k, fb, l), series - predicted)
    res.trusted += 1
    res.record(("c", "d"), TABLE.c_d() - RatFun(1) / HB)
    return res


# ---------------------------------------------------------------------------
# components of lower-half products in the F H E factorization


def _f_component_h_f(b: int, depth: int) -> dict[tuple[str, int], RatFun]:
    """F-part of ``[h_{-1}, f_b]``.

    From ``[h_{k+1}, f_l] - [h_k, f_{l+1}] = -hbar {h_k, f_l}`` at ``k = -1`` and
    ``[h_0, f_l] = -2 f_l``, the F-part ``c_l`` obeys ``c_{l+1} = -2 f_l + hbar c_l``,
    so ``c_b = -2 sum_j hbar^j f_{b-1-j}``.
    """
    return {("f", b - 1 - j): RatFun(-2) * _hpow(j) for j in range(depth)}


def _e_component_e_h(b: int, depth: int) -> dict[tuple[str, int], RatFun]:
    """E-part of ``[e_b, h_{-1}]`` (mirror of the recursion for f)."""
    return {("e", b - 1 - j): RatFun(-2) * _hpow(j) for j in range(depth)}


def _pair_h_hh(k: int, a: int, b: int) -> RatFun:
    """``<h_k, h_a h_b>`` from the group-like generating function
    ``<h+(u), h-(v1) h-(v2)> = P(u, v1) P(u, v2)``, ``P = (u - v + hbar)/(u - v - hbar)``."""
    K = k + 1
    prod = RatFun(_u - _v + _h, _u - _v - _h) * RatFun(_u - _v2 + _h, _u - _v2 - _h)
    outer = laurent_expand(prod, ExpansionRegion.at_infinity("u"), (-K, 0))
    cu = outer.coeffs.get(-k - 1, 0)
    p, q = -a - 1, -b - 1
    if cu == 0:
        return RatFun(0)
    s1 = laurent_expand(RatFun(cu), ExpansionRegion.at_zero("v"), (0, p))
    c1 = s1.coeffs.get(p, 0)
    if c1 == 0:
        return RatFun(0)
    s2 = laurent_expand(RatFun(c1), ExpansionRegion.at_zero("w"), (0, q))
    total = RatFun(s2.coeffs.get(q, 0))
    # remove the single-h contributions sitting at v1^0 or v2^0
    if p == 0:
        total = total - RatFun(-1) * HB * TABLE.pair(("h", k), ("h", b)) * HB
    if q == 0:
        total = total - RatFun(-1) * HB * TABLE.pair(("h", k), ("h", a)) * HB
    # total = hbar * hbar^2 <h_k, h_a h_b>
    return total / (HB * HB * HB)


def pair_with_product(a: tuple[str, int], b1: tuple[str, int], b2: tuple[str, int], depth: int = 6) -> RatFun:
    """``<a, b1 b2>`` for a single upper mode ``a``, via the factorization property."""
    fa, k = a
    word = (b1[0], b2[0])
    if fa == "e":
        # only the pure-F component pairs with e_k
        if word == ("h", "f"):
            if b1[1] != -1:
                raise NotImplementedError("reordering implemented for h_{-1} only")
            comp = _f_component_h_f(b2[1], depth)
            return sum((c * TABLE.pair(a, m) for m, c in comp.items()), RatFun(0))
        return RatFun(0)
    if fa == "f":
        if word == ("e", "h"):
            if b2[1] != -1:
                raise NotImplementedError("reordering implemented for h_{-1} only")
            comp = _e_component_e_h(b1[1], depth)
            return sum((c * TABLE.pair(a, m) for m, c in comp.items()), RatFun(0))
        return RatFun(0)
    if fa == "h":
        if word == ("e", "f"):
            # e_a f_b = f_b e_a + h_{a+b}
            return TABLE.pair(a, ("h", b1[1] + b2[1]))
        if word == ("h", "h"):
            return _pair_h_hh(k, b1[1], b2[1])
        return RatFun(0)
    raise ValueError(a)


def coproduct_low(a: str) -> list[tuple[RatFun, tuple[str, int] | None, tuple[str, int] | None]]:
    """Low-degree coproducts as ``(coeff, left, right)``; ``None`` is the unit."""
    one = RatFun(1)
    table = {
        "e0": [(one, ("e", 0), None), (one, None, ("e", 0))],
        "f0": [(one, ("f", 0), None), (one, None, ("f", 0))],
        "h0": [(one, ("h", 0), None), (one, None, ("h", 0))],
        "e1": [(one, ("e", 1), None), (one, None, ("e", 1)), (HB, ("h", 0), ("e", 0))],
        "f1": [(one, ("f", 1), None), (one, None, ("f", 1)), (HB, ("f", 0), ("h", 0))],
        "h1": [(one, ("h", 1), None), (one, None, ("h", 1)), (HB, ("h", 0), ("h", 0)),
               (RatFun(-2) * HB, ("f", 0), ("e", 0))],
    }
    return table[a]


def pair_coproduct(a: str, b1: tuple[str, int], b2: tuple[str, int]) -> RatFun:
    """``<Delta(a), b1 (x) b2>`` with the first factors paired together."""
    total = RatFun(0)
    for c, left, right in coproduct_low(a):
        if left is None or right is None:
            continue  # <1, b> = counit(b) = 0 for a mode b
        total = total + c * TABLE.pair(left, b1) * TABLE.pair(right, b2)
    return total


SPOT_UPPER = ("e0", "e1", "f0", "f1", "h0", "h1")
SPOT_LOWER = (("e", -1), ("f", -1), ("h", -1))


def hopf_spot_checks(upper: Iterable[str] = SPOT_UPPER) -> Residual:
    """``<a, b1 b2> = <Delta(a), b1 (x) b2>`` for low-degree ``a`` and degree ``-1`` lower modes."""
    res = Residual("pairing-hopf")
    values = []
    for a in upper:
        fa, k = a[0], int(a[1:])
        for b1 in SPOT_LOWER:
            for b2 in SPOT_LOWER:
                lhs = pair_with_product((fa, k), b1, b2)
                rhs = pair_coproduct(a, b1, b2)
                res.trusted += 1
                res.record((a, b1, b2), lhs - rhs)
                values.append((a, b1, b2, str(lhs)))
    res.parameters["values"] = [[a, f"{b1[0]}{b1[1]}", f"{b2[0]}{b2[1]}", v] for a, b1, b2, v in values]
    return res


def pairing_spotcheck(K: int = 4) -> Residual:
    res = regenerate_from_generating_functions(K)
    res.relation_id = "pairing"
    res.merge(hopf_spot_checks())
    return res


@dataclass(frozen=True)
class BinomialShiftedModes:
    """``g_k = sum_{m=0}^{k} binom(k, m) f_{k-m} (hbar c)^m`` as a combination of f-modes.

    ``c`` is a scalar (the central charge value on the module); ``hbar`` stays symbolic.
    """

    c: Fraction | int = 0

    def g(self, k: int) -> dict[tuple[str, int], RatFun]:
        if k < 0:
            raise ValueError("g_k is defined for k >= 0")
        out = {}
        for m in range(k + 1):
            coeff = RatFun(gbinom(k, m) * Fraction(self.c) ** m) * _hpow(m)
            if not coeff.is_zero():
                out[("f", k - m)] = coeff
        return out

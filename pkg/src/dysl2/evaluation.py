"""Two-dimensional evaluation modules, the rational R-matrix and the coproduct.

Basis of ``W_x`` is ``(w+, w-)``; tensor products use the order
``(w+w+, w+w-, w-w+, w-w-)``.  Central charge acts as zero on every
evaluation module.
"""

from __future__ import annotations

import cmath
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import mpmath

from .algebra import (
    HBAR,
    ExpansionRegion,
    RatFun,
    ScalarPoly,
    laurent_expand,
    poly_gens,
    to_fraction,
)
from .representation import Residual


def _is_zero(c) -> bool:
    if isinstance(c, (RatFun, ScalarPoly)):
        return c.is_zero()
    return c == 0


class Mat:
    """Dense square matrix over RatFun (exact) or numbers."""

    __slots__ = ("n", "rows")

    def __init__(self, rows: Sequence[Sequence[Any]]):
        self.rows = [list(r) for r in rows]
        self.n = len(self.rows)

    @classmethod
    def zeros(cls, n: int) -> "Mat":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "Mat") -> "Mat":
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = 0
                for k in range(n):
                    a = self.rows[i][k]
                    if _is_zero(a):
                        continue
                    b = other.rows[k][j]
                    if _is_zero(b):
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Mat(out)

    def __add__(self, other: "Mat") -> "Mat":
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "Mat":
        return Mat([[a * c if not _is_zero(a) else 0 for a in r] for r in self.rows])

    __rmul__ = scale

    def kron(self, other: "Mat") -> "Mat":
        n, m = self.n, other.n
        out = [[0] * (n * m) for _ in range(n * m)]
        for i in range(n):
            for j in range(n):
                a = self.rows[i][j]
                if _is_zero(a):
                    continue
                for k in range(m):
                    for l in range(m):
                        b = other.rows[k][l]
                        if not _is_zero(b):
                            out[i * m + k][j * m + l] = a * b
        return Mat(out)

    def map(self, fn: Callable) -> "Mat":
        return Mat([[fn(a) for a in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(_is_zero(a) for r in self.rows for a in r)

    def nonzero_entries(self) -> list[tuple[int, int, Any]]:
        return [(i, j, a) for i, r in enumerate(self.rows) for j, a in enumerate(r) if not _is_zero(a)]

    def max_abs(self) -> float:
        return max((abs(complex(a)) for r in self.rows for a in r), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def subs(self, **values) -> "Mat":
        def f(a):
            if isinstance(a, (RatFun, ScalarPoly)):
                r = RatFun(a) if isinstance(a, ScalarPoly) else a
                r = r.subs(**values)
                return r.num.constant_value() / r.den.constant_value() if r.num.is_constant() and r.den.is_constant() else r
            return a
        return self.map(f)

    def evaluate(self, values: dict) -> "Mat":
        def f(a):
            if isinstance(a, (RatFun, ScalarPoly)):
                return a.evaluate(values)
            return a
        return self.map(f)

    def inverse(self) -> "Mat":
        """Gauss-Jordan inverse over the entry field."""
        n = self.n
        a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if not _is_zero(a[r][col])), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            inv = (RatFun(1) / p) if isinstance(p, (RatFun, ScalarPoly)) else (
                Fraction(1) / p if isinstance(p, (int, Fraction)) else 1 / p)
            a[col] = [x * inv if not _is_zero(x) else 0 for x in a[col]]
            for r in range(n):
                if r != col and not _is_zero(a[r][col]):
                    f = a[r][col]
                    a[r] = [x - f * y if not _is_zero(y) else x for x, y in zip(a[r], a[col])]
        return Mat([r[n:] for r in a])

    def to_json(self) -> list:
        def enc(a):
            if isinstance(a, (RatFun, ScalarPoly)):
                return str(a)
            if isinstance(a, complex):
                return [a.real, a.imag]
            if isinstance(a, (int, Fraction)):
                f = Fraction(a)
                return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
            return a
        return [[enc(a) for a in r] for r in self.rows]

    def __repr__(self):
        return "Mat(" + "; ".join(", ".join(str(a) for a in r) for r in self.rows) + ")"


Matrix2 = Mat
Matrix4 = Mat

E = Mat([[0, 1], [0, 0]])
F = Mat([[0, 0], [1, 0]])
H = Mat([[1, 0], [0, -1]])
I2 = Mat.identity(2)
PERM = Mat([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def symbols(*names: str) -> tuple[RatFun, ...]:
    """Rational-function generators in a common ring containing hbar."""
    base = ("u", "v", "x", "y", "z", "t", HBAR)
    gens = poly_gens(*names, variables=base + tuple(n for n in names if n not in base))
    return tuple(RatFun(g) for g in gens)


def _power(x, k: int):
    if isinstance(x, (RatFun, ScalarPoly)):
        return RatFun(x) ** k
    if k >= 0:
        return x ** k
    return Fraction(1) / Fraction(x) ** (-k) if isinstance(x, (int, Fraction)) else 1 / x ** (-k)


@dataclass(frozen=True)
class EvalRep:
    """Evaluation module ``W_x``: ``e_k w- = x^k w+``, ``f_k w+ = x^k w-``, ``h_k w+- = +-x^k w+-``."""

    x: Any

    def generator(self, family: str, k: int) -> Mat:
        return eval_generator(family, k, self.x)


def eval_generator(family: str, k: int, x) -> Mat:
    xk = _power(x, k)
    base = {"e": E, "f": F, "h": H}.get(family)
    if base is None:
        raise ValueError(f"unknown family {family!r}")
    return base.scale(xk)


# ---------------------------------------------------------------------------
# mode relations of the algebra C (all integer modes)


def comm(a: Mat, b: Mat) -> Mat:
    return a @ b - b @ a


def anti(a: Mat, b: Mat) -> Mat:
    return a @ b + b @ a


RELATION_IDS = ("h-h", "e-f", "h0-e", "h0-f", "h-e", "h-f", "e-e", "f-f")


def defining_relations(gen: Callable[[str, int], Mat], hbar, K: int,
                       ids: Iterable[str] = RELATION_IDS) -> dict[str, Residual]:
    """Check the mode relations for ``k, l`` in ``[-K, K]`` (shifted modes may reach ``K+1``)."""
    cache: dict = {}

    def g(f, k):
        if (f, k) not in cache:
            cache[(f, k)] = gen(f, k)
        return cache[(f, k)]

    rng = range(-K, K + 1)
    out: dict[str, Residual] = {}
    for rid in ids:
        res = Residual(rid, parameters={"K": K})
        for k in rng:
            for l in rng:
                if rid == "h-h":
                    r = comm(g("h", k), g("h", l))
                elif rid == "e-f":
                    r = comm(g("e", k), g("f", l)) - g("h", k + l)
                elif rid == "h0-e":
                    if k != 0:
                        continue
                    r = comm(g("h", 0), g("e", l)) - g("e", l).scale(2)
                elif rid == "h0-f":
                    if k != 0:
                        continue
                    r = comm(g("h", 0), g("f", l)) + g("f", l).scale(2)
                elif rid == "h-e":
                    r = comm(g("h", k + 1), g("e", l)) - comm(g("h", k), g("e", l + 1)) - anti(g("h", k), g("e", l)).scale(hbar)
                elif rid == "h-f":
                    r = comm(g("h", k + 1), g("f", l)) - comm(g("h", k), g("f", l + 1)) + anti(g("h", k), g("f", l)).scale(hbar)
                elif rid == "e-e":
                    r = comm(g("e", k + 1), g("e", l)) - comm(g("e", k), g("e", l + 1)) - anti(g("e", k), g("e", l)).scale(hbar)
                elif rid == "f-f":
                    r = comm(g("f", k + 1), g("f", l)) - comm(g("f", k), g("f", l + 1)) + anti(g("f", k), g("f", l)).scale(hbar)
                else:
                    raise KeyError(rid)
                res.trusted += 1
                for i, j, a in r.nonzero_entries():
                    res.record((rid, k, l, i, j), a)
        out[rid] = res
    return out


def verify_defining_modes_eval(x=None, K: int = 4) -> dict[str, Residual]:
    """All mode relations as symbolic 2x2 identities in ``x``."""
    if x is None:
        (x, hbar) = symbols("x", HBAR)
    else:
        (hbar,) = symbols(HBAR)
    return defining_relations(lambda f, k: eval_generator(f, k, x), hbar, K)


# ---------------------------------------------------------------------------
# R-matrix and scalar factors


def rbar(u) -> Mat:
    """``(u + hbar P)/(u + hbar)``; ``u`` symbolic or a number (then hbar must be numeric too)."""
    (hbar,) = symbols(HBAR)
    return rbar_h(u, hbar)


def rbar_h(u, hbar) -> Mat:
    den = u + hbar
    if _is_zero(den):
        raise ZeroDivisionError("R-matrix pole at u = -hbar")
    a = u / den
    b = hbar / den
    return Mat([[1, 0, 0, 0], [0, a, b, 0], [0, b, a, 0], [0, 0, 0, 1]])


class PoleError(ArithmeticError):
    pass


def _near_pole(z: complex, eps: float) -> bool:
    """Distance from a Gamma-function pole (nonpositive integer)."""
    if z.real > 0.5:
        return False
    n = round(z.real)
    return n <= 0 and abs(z - n) < eps


def log_gamma(z: complex, eps: float = 1e-8) -> complex:
    if _near_pole(complex(z), eps):
        raise PoleError(f"Gamma argument {z} within {eps} of a pole")
    return complex(mpmath.loggamma(z))


def rho(eps: str, u, hbar=1.0, pole_eps: float = 1e-8) -> complex:
    """Scalar factors of the R-matrix, principal branch of log-Gamma.

    ``rho('+', u) = G(-w)G(1-w)/G(1/2-w)^2`` and
    ``rho('-', u) = G(1/2+w)^2/(G(w)G(1+w))`` with ``w = u/(2 hbar)``.
    """
    w = complex(u) / (2 * complex(hbar))
    if eps == "+":
        lg = log_gamma(-w, pole_eps) + log_gamma(1 - w, pole_eps) - 2 * log_gamma(0.5 - w, pole_eps)
    elif eps == "-":
        lg = 2 * log_gamma(0.5 + w, pole_eps) - log_gamma(w, pole_eps) - log_gamma(1 + w, pole_eps)
    else:
        raise ValueError("eps must be '+' or '-'")
    return cmath.exp(lg)


@dataclass(frozen=True)
class ScalarFactor:
    sign: str
    hbar: float = 1.0
    pole_eps: float = 1e-8

    def __call__(self, u) -> complex:
        return rho(self.sign, u, self.hbar, self.pole_eps)


# ---------------------------------------------------------------------------
# Yang-Baxter identities in three evaluation slots


def _embed(R: Mat, slots: tuple[int, int]) -> Mat:
    """Embed a 4x4 operator acting on tensor slots ``slots`` (ordered) of a triple product."""
    n = 8
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        bits_i = [(i >> 2) & 1, (i >> 1) & 1, i & 1]
        for j in range(n):
            bits_j = [(j >> 2) & 1, (j >> 1) & 1, j & 1]
            other = [s for s in range(3) if s not in slots][0]
            if bits_i[other] != bits_j[other]:
                continue
            a, b = slots
            ri = bits_i[a] * 2 + bits_i[b]
            rj = bits_j[a] * 2 + bits_j[b]
            v = R.rows[ri][rj]
            if not _is_zero(v):
                out[i][j] = v
    return Mat(out)


def ybe_sides(kind: str, x, y, z, hbar) -> tuple[Mat, Mat]:
    """Both sides of the pure or mixed Yang-Baxter identity.

    pure:  R12(x-y) R13(x-z) R23(y-z)  vs  R23(y-z) R13(x-z) R12(x-y)
    mixed: R12(x-y) R13(x-z) R32(z-y)^-1  vs  R32(z-y)^-1 R13(x-z) R12(x-y)
    """
    R12 = _embed(rbar_h(x - y, hbar), (0, 1))
    R13 = _embed(rbar_h(x - z, hbar), (0, 2))
    if kind in ("pure", "pure+", "pure-"):
        R23 = _embed(rbar_h(y - z, hbar), (1, 2))
        return R12 @ R13 @ R23, R23 @ R13 @ R12
    if kind == "mixed":
        R32i = _embed(rbar_h(z - y, hbar), (2, 1)).inverse()
        return R12 @ R13 @ R32i, R32i @ R13 @ R12
    raise ValueError(f"unknown Yang-Baxter kind {kind!r}")


def check_ybe(kind: str, points: int = 100, seed: int = 0) -> Residual:
    """Symbolic identity in ``(x, y, z)`` plus exact checks at seeded random rational points."""
    t0 = time.perf_counter()
    x, y, z, hbar = symbols("x", "y", "z", HBAR)
    lhs, rhs = ybe_sides(kind, x, y, z, hbar)
    res = Residual(f"ybe-{kind}", parameters={"points": points, "seed": seed})
    res.trusted += 64
    for i, j, a in (lhs - rhs).nonzero_entries():
        res.record(("symbolic", i, j), a)
    rng = random.Random(seed)
    done = 0
    while done < points:
        vals = [Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(4)]
        px, py, pz, ph = vals
        if ph == 0 or px - py + ph == 0 or px - pz + ph == 0 or py - pz + ph == 0 or pz - py + ph == 0:
            continue
        if kind == "mixed" and (pz - py) ** 2 == ph ** 2:
            continue  # R32 not invertible
        l, r = ybe_sides(kind, px, py, pz, ph)
        res.trusted += 64
        for i, j, a in (l - r).nonzero_entries():
            res.record(("point", tuple(str(v) for v in vals), i, j), a)
        done += 1
    res.wall_time = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# coproduct on W_x (x) W_y


def currents(x, u, hbar) -> dict[str, Mat]:
    """Half-currents on ``W_x`` as rational functions of ``u``.

    Both halves of each current have the same rational form; they differ
    only by the expansion region (``|u| > |x|`` or ``|u| < |x|``).
    """
    d = u - x
    return {
        "e": E.scale(RatFun(1) / d if isinstance(d, (RatFun, ScalarPoly)) else 1 / d),
        "f": F.scale(RatFun(1) / d if isinstance(d, (RatFun, ScalarPoly)) else 1 / d),
        "h": Mat([[(d + hbar) / d, 0], [0, (d - hbar) / d]]),
    }


def coproduct_pair(family: str, u, x, y, hbar=None) -> Mat:
    """Coproduct of a current on ``W_x (x) W_y`` at zero central charge.

    Nilpotency truncates every sum: ``E^2 = F^2 = 0``.
    """
    if hbar is None:
        (hbar,) = symbols(HBAR)
    a = currents(x, u, hbar)
    b = currents(y, u, hbar)
    a1 = currents(x, u + hbar, hbar)
    b1 = currents(y, u + hbar, hbar)
    if family == "e":
        return a["e"].kron(I2) + a["h"].kron(b["e"])
    if family == "f":
        return I2.kron(b["f"]) + a["f"].kron(b["h"])
    if family == "h":
        return a["h"].kron(b["h"]) - (a1["f"] @ a["h"]).kron(b["h"] @ b1["e"]).scale(2 * hbar * hbar)
    raise ValueError(f"unknown family {family!r}")


def _swap_xy(m: Mat, x, y) -> Mat:
    """Exchange the symbols x and y in every entry."""
    def f(a):
        if isinstance(a, RatFun):
            tmp, = symbols("tmpswap")
            return a.compose(x=tmp.num).compose(y=x.num).compose(tmpswap=y.num)
        return a
    return m.map(f)


def coproduct_modes(x, y, hbar, K: int) -> Callable[[str, int], Mat]:
    """Mode images: ``k >= 0`` from the expansion at ``u = oo``, ``k < 0`` at ``u = 0``."""
    (u,) = symbols("u")
    cur = {fam: coproduct_pair(fam, u, x, y, hbar) for fam in ("e", "f", "h")}
    cache: dict = {}

    def expand(fam, k):
        power = -k - 1
        m = cur[fam]
        if k >= 0:
            region = ExpansionRegion.at_infinity("u")
            window = (power, 0)
        else:
            region = ExpansionRegion.at_zero("u")
            window = (0, power)
        rows = []
        for r in m.rows:
            row = []
            for a in r:
                if _is_zero(a):
                    row.append(0)
                    continue
                tl = laurent_expand(a, region, window)
                c = tl.coeffs.get(power, 0)
                row.append(RatFun(c) if isinstance(c, ScalarPoly) else c)
            rows.append(row)
        return Mat(rows)

    def gen(fam, k):
        key = (fam, k)
        if key in cache:
            return cache[key]
        c = expand(fam, k)
        sign = 1 if k >= 0 else -1
        if fam == "h":
            if k == -1:
                # h-(u) = 1 - hbar sum_{k<0} h_k u^{-k-1}: the constant 1 sits at u^0
                c = c - Mat.identity(4)
            c = c.scale(RatFun(sign) / hbar)
        else:
            c = c.scale(sign)
        cache[key] = c
        return c

    return gen


def tensor_generators(x, y):
    def g(fam, k):
        return eval_generator(fam, k, x), eval_generator(fam, k, y)
    return g


def degree_one_coproduct(x, y, hbar) -> dict[str, Mat]:
    """The low-degree coproduct formulas, built from evaluation generators."""
    def ev(f, k, w):
        return eval_generator(f, k, w)
    one = I2
    return {
        "e0": ev("e", 0, x).kron(one) + one.kron(ev("e", 0, y)),
        "f0": ev("f", 0, x).kron(one) + one.kron(ev("f", 0, y)),
        "h0": ev("h", 0, x).kron(one) + one.kron(ev("h", 0, y)),
        "e1": ev("e", 1, x).kron(one) + one.kron(ev("e", 1, y)) + ev("h", 0, x).kron(ev("e", 0, y)).scale(hbar),
        "f1": ev("f", 1, x).kron(one) + one.kron(ev("f", 1, y)) + ev("f", 0, x).kron(ev("h", 0, y)).scale(hbar),
        "h1": ev("h", 1, x).kron(one) + one.kron(ev("h", 1, y)) + ev("h", 0, x).kron(ev("h", 0, y)).scale(hbar)
        - ev("f", 0, x).kron(ev("e", 0, y)).scale(2 * hbar),
    }


def half_current_relations(x, y, hbar) -> dict[str, Residual]:
    """Generating-function relations for the coproduct images, as rational identities in ``(u, v)``."""
    u, v = symbols("u", "v")
    D = {}
    for fam in ("e", "f", "h"):
        D[(fam, "u")] = coproduct_pair(fam, u, x, y, hbar)
        D[(fam, "v")] = coproduct_pair(fam, v, x, y, hbar)
    d = u - v
    inv = RatFun(1) / d
    e_u, e_v, f_u, f_v, h_u, h_v = (D[("e", "u")], D[("e", "v")], D[("f", "u")], D[("f", "v")],
                                    D[("h", "u")], D[("h", "v")])
    checks = {
        "gf-h-h": comm(h_u, h_v),
        "gf-e-f": comm(e_u, f_v) + (h_u - h_v).scale(inv / hbar),
        "gf-h-e": comm(h_u, e_v) + anti(h_u, e_u - e_v).scale(hbar * inv),
        "gf-h-f": comm(h_u, f_v) - anti(h_u, f_u - f_v).scale(hbar * inv),
        "gf-e-e": comm(e_u, e_v) + ((e_u - e_v) @ (e_u - e_v)).scale(hbar * inv),
        "gf-f-f": comm(f_u, f_v) - ((f_u - f_v) @ (f_u - f_v)).scale(hbar * inv),
    }
    out = {}
    for rid, m in checks.items():
        res = Residual(rid)
        res.trusted += 16
        for i, j, a in m.nonzero_entries():
            res.record((rid, i, j), a)
        out[rid] = res
    return out


def delta_op(gen: Callable[[str, int], Mat], x, y) -> Callable[[str, int], Mat]:
    """Opposite coproduct on ``W_x (x) W_y``: flip conjugation of the images with ``x`` and ``y`` exchanged."""
    def g(fam, k):
        return PERM @ _swap_xy(gen(fam, k), x, y) @ PERM
    return g


def verify_coproduct_hom_and_intertwine(K: int = 3, include_modes: bool = True) -> dict[str, Residual]:
    """Homomorphism and intertwining checks, all symbolic in ``x, y, hbar``."""
    x, y, hbar = symbols("x", "y", HBAR)
    out: dict[str, Residual] = {}
    out.update(half_current_relations(x, y, hbar))
    gen = coproduct_modes(x, y, hbar, K)
    # low-degree formulas
    low = degree_one_coproduct(x, y, hbar)
    res = Residual("coproduct-low-degree")
    for name, m in low.items():
        fam, k = name[0], int(name[1])
        res.trusted += 16
        for i, j, a in (gen(fam, k) - m).nonzero_entries():
            res.record((name, i, j), a)
    out["coproduct-low-degree"] = res
    if include_modes:
        for rid, r in defining_relations(gen, hbar, K).items():
            out["delta-" + rid] = r
    # intertwining
    R = rbar_h(x - y, hbar)
    op = delta_op(gen, x, y)
    res = Residual("intertwine")
    for fam in ("e", "f", "h"):
        for k in range(-K, K + 1):
            m = R @ gen(fam, k) - op(fam, k) @ R
            res.trusted += 16
            for i, j, a in m.nonzero_entries():
                res.record((fam, k, i, j), a)
    out["intertwine"] = res
    return out


# ---------------------------------------------------------------------------
# universal R-matrix in evaluation slots


@dataclass(frozen=True)
class LogCartanSeries:
    """``h+(u)`` on ``W_x`` and ``h-(v)`` on ``W_y`` as products of linear factors.

    ``h+(u) w_s = prod (u - a)^{sigma}`` over ``plus_poles(s)``; ``h-(v)`` is the same
    rational function of ``v`` with ``x`` replaced by ``y``.
    """

    hbar: float = 1.0

    def plus_poles(self, sign: int, x: float) -> list[tuple[float, int]]:
        """``(a, sigma)`` with ``d/du k+(u) = (1/hbar) sum sigma/(u - a)``."""
        return [(x - sign * self.hbar, 1), (x, -1)]

    def h_minus(self, sign: int, y: float, v: complex) -> complex:
        return (v - y + sign * self.hbar) / (v - y)


def cartan_factor(sign1: int, sign2: int, t: float, n: int, hbar: float = 1.0) -> float:
    """``exp(hbar Res_{u=v} k+'(u) (x) k-(v + (2n+1) hbar))`` on ``w_sign1 (x) w_sign2``.

    With ``Res_{u=v}`` pairing ``u^{-k-1}`` against ``v^k``, the residue against
    ``1/(u - a)`` evaluates the second factor at ``a``; hence the factor is
    ``prod h-(a + s)^{sigma/hbar}`` over the poles of ``d/du k+``.
    """
    L = LogCartanSeries(hbar)
    s = (2 * n + 1) * hbar
    x, y = t, 0.0
    logv = 0.0
    for a, sigma in L.plus_poles(sign1, x):
        logv += sigma * math.log(L.h_minus(sign2, y, a + s).real) / hbar
    return math.exp(logv)


def cartan_product(t: float, N: int, hbar: float = 1.0) -> list[float]:
    """Diagonal of the truncated ``R_0`` (factors ``n = 0..N``), order (++, +-, -+, --)."""
    import numpy as np

    n = np.arange(N + 1, dtype=float)
    s = (2 * n + 1) * hbar
    out = []
    for s1, s2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        # sum_poles sigma * log h-(a+s) with h-(v) = (v - y + s2 hbar)/(v - y), y = 0
        total = np.zeros_like(n)
        negatives = 0
        for a, sigma in ((t - s1 * hbar, 1), (t, -1)):
            v = a + s
            ratio = (v + s2 * hbar) / v
            negatives += int(np.count_nonzero(ratio < 0))
            total += sigma * np.log(np.abs(ratio)) / hbar
        if negatives % 2 and hbar != 1.0:
            raise ValueError("negative factor under a fractional power")
        out.append((-1) ** negatives * float(np.exp(total.sum())))
    return out


def universal_r_slots(t, N: int, hbar: float = 1.0) -> Mat:
    """``R_+ R_0 R_-`` on ``W_x (x) W_y`` with ``t = x - y``.

    ``R_+ = exp(-hbar sum_k e_k (x) f_{-k-1}) = 1 + (hbar/t) E(x)F`` after summing the
    geometric series in ``|y| > |x|``; ``R_-`` likewise with ``F (x) E``.
    """
    c = hbar / t
    Rp = Mat.identity(4) + E.kron(F).scale(c)
    Rm = Mat.identity(4) + F.kron(E).scale(c)
    d = cartan_product(t, N, hbar)
    R0 = Mat([[d[i] if i == j else 0 for j in range(4)] for i in range(4)])
    return Rp @ R0 @ Rm


@dataclass
class Reconstruction:
    t: float
    N: int
    matrix: Mat
    richardson: Mat
    reference: Mat
    error: float
    richardson_error: float
    decay_ratio: float  # err(N)/err(2N); ~2 for O(1/N)

    def to_json(self) -> dict:
        return {
            "t": self.t, "N": self.N, "error": self.error, "richardson_error": self.richardson_error,
            "decay_ratio": self.decay_ratio,
        }


def reconstruct_universal_R(t: float, N: int = 10_000, hbar: float = 1.0,
                            scalar: Callable[[float], complex] | None = None) -> Reconstruction:
    """Compare the truncated product with ``scalar(t) * Rbar(t)`` (default ``rho('-', t)``)."""
    if scalar is None:
        def scalar(tt):
            return rho("-", tt, hbar)
    ref = rbar_h(t, hbar).scale(scalar(t).real)
    m1 = universal_r_slots(t, N, hbar)
    m2 = universal_r_slots(t, 2 * N, hbar)
    rich = m2.scale(2) - m1
    e1 = (m1 - ref).max_abs()
    e2 = (m2 - ref).max_abs()
    er = (rich - ref).max_abs()
    return Reconstruction(t, N, m1, rich, ref, e1, er, e1 / e2 if e2 else float("inf"))


def inverse_rho_scalar(hbar: float = 1.0) -> Callable[[float], complex]:
    return lambda t: 1 / rho("-", t, hbar)

"""Truncated free-boson Fock modules and normal-ordered exponential operators.

A basis state is ``|m, lam>``: the monomial ``prod_n a_{-n}^{r_n}`` applied to
the charge vacuum of weight ``m`` (the eigenvalue of ``p``), where ``r_n`` is
the multiplicity of ``n`` in the partition ``lam``.  Monomials are not
normalized, so ``a_{-n}`` multiplies by ``x_n`` and ``a_n`` acts as
``n * d/dx_n``.

Exact coefficients inside operators are univariate polynomials in hbar
(``flint.fmpq_poly``); numeric coefficients are Python complex numbers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Any, Callable, Iterable, Iterator, Mapping, Union

import flint

from .algebra import (
    HBAR,
    ScalarPoly,
    Side,
    TruncatedLaurent,
    TruncationError,
    fraction_str,
    gbinom,
    to_fraction,
)

HPoly = flint.fmpq_poly
HBAR_POLY = flint.fmpq_poly([0, 1])


class FockError(ValueError):
    pass


# ---------------------------------------------------------------------------
# states and vectors


@dataclass(frozen=True, order=True)
class FockState:
    """Weight ``m`` (p-eigenvalue, twice the charge) and a partition, parts descending."""

    m: int
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise FockError(f"partition parts must be positive: {self.parts}")
        if tuple(sorted(self.parts, reverse=True)) != self.parts:
            object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))

    @property
    def energy(self) -> int:
        return sum(self.parts)

    @property
    def sector(self) -> int:
        return self.m % 2

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    @classmethod
    def from_multiplicities(cls, m: int, mult: Mapping[int, int]) -> "FockState":
        parts: list[int] = []
        for n, r in mult.items():
            parts.extend([n] * r)
        return cls(m, tuple(sorted(parts, reverse=True)))

    def sort_key(self):
        """Documented enumeration order: (energy, weight, lexicographic partition)."""
        return (self.energy, self.m, self.parts)

    def to_json(self) -> dict:
        return {"m": self.m, "partition": list(self.parts), "sector": self.sector}

    def __str__(self):
        mono = "".join(f"a_-{p}" for p in self.parts)
        return f"{mono}|{self.m}>"


def vacuum(m: int = 0) -> FockState:
    return FockState(m, ())


@lru_cache(maxsize=None)
def partitions(n: int, largest: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``n`` with parts descending, in lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(1, min(n, largest) + 1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class Cutoffs:
    """Truncation parameters.

    ``m_window`` bounds the weights of states fed to checks (intermediate
    states may leave it); ``u_window`` is the inclusive range of series powers.
    """

    e_max: int = 4
    m_window: tuple[int, int] = (-4, 4)
    u_window: tuple[int, int] = (-5, 2)
    margin: int = 0

    def __post_init__(self):
        if self.e_max < 0:
            raise FockError("e_max must be nonnegative")
        if self.margin > self.e_max:
            raise FockError("margin must not exceed e_max")
        if self.m_window[0] > self.m_window[1] or self.u_window[0] > self.u_window[1]:
            raise FockError("empty window")


def basis(sector: int, cutoffs: Cutoffs) -> list[FockState]:
    """All states of the given sector under the cutoffs, in (energy, weight, partition) order."""
    lo, hi = cutoffs.m_window
    weights = [m for m in range(lo, hi + 1) if m % 2 == sector]
    states = [FockState(m, lam) for e in range(cutoffs.e_max + 1) for m in weights for lam in partitions(e)]
    states.sort(key=FockState.sort_key)
    return states


def _is_zero(c) -> bool:
    if isinstance(c, (ScalarPoly, TruncatedLaurent)):
        return c.is_zero()
    return c == 0


class FockVector:
    """Finite linear combination of basis states of one sector."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[FockState, Any] | None = None):
        self.terms: dict[FockState, Any] = {}
        sector = None
        for s, c in (terms or {}).items():
            if _is_zero(c):
                continue
            if sector is None:
                sector = s.sector
            elif s.sector != sector:
                raise FockError("a Fock vector cannot mix sectors")
            self.terms[s] = c

    @classmethod
    def basis_vector(cls, state: FockState, coeff: Any = None) -> "FockVector":
        return cls({state: HPoly(1) if coeff is None else coeff})

    def __getitem__(self, s: FockState):
        return self.terms.get(s, 0)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out[s] + c if s in out else c
        return FockVector(out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def scale(self, c) -> "FockVector":
        return FockVector({s: v * c for s, v in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def to_json(self) -> list:
        return [[s.to_json(), coeff_to_json(c)] for s, c in sorted(self.terms.items(), key=lambda t: t[0].sort_key())]

    def __repr__(self):
        body = " + ".join(f"({c})*{s}" for s, c in sorted(self.terms.items(), key=lambda t: t[0].sort_key()))
        return f"FockVector({body or '0'})"


def coeff_to_json(c):
    """Exact values become ``"p/q"`` strings or monomial lists; floats stay numbers."""
    if isinstance(c, (int, Fraction)):
        return fraction_str(c)
    if isinstance(c, flint.fmpq):
        return fraction_str(to_fraction(c))
    if isinstance(c, flint.fmpq_poly):
        return [[[i], fraction_str(to_fraction(c[i]))] for i in range(c.degree(), -1, -1) if c[i] != 0]
    if isinstance(c, ScalarPoly):
        return c.to_json()
    if isinstance(c, complex):
        return [c.real, c.imag]
    if isinstance(c, float):
        return c
    return str(c)


def hpoly_const(c) -> flint.fmpq_poly:
    c = to_fraction(c)
    return HPoly([flint.fmpq(c.numerator, c.denominator)])


def hpoly_to_scalar(p: flint.fmpq_poly) -> ScalarPoly:
    return ScalarPoly({(i,): to_fraction(p[i]) for i in range(p.degree() + 1) if p[i] != 0}, (HBAR,))


def scalar_to_hpoly(s: ScalarPoly) -> flint.fmpq_poly:
    if set(s.variables) - {HBAR} and any(
        e for m, _ in s.terms() for v, e in zip(s.variables, m) if v != HBAR
    ):
        raise FockError("coefficient depends on variables other than hbar")
    i = s.variables.index(HBAR)
    deg = s.degree(HBAR)
    coeffs = [Fraction(0)] * (deg + 1)
    for m, c in s.terms():
        coeffs[m[i]] += c
    return HPoly([flint.fmpq(c.numerator, c.denominator) for c in coeffs])


# ---------------------------------------------------------------------------
# Heisenberg generators


@dataclass
class ActResult:
    vector: FockVector
    truncation_events: int = 0


def heisenberg_act(mode: Union[int, str], v: FockVector, e_max: int | None = None) -> ActResult:
    """Act with ``a_n`` (integer ``n != 0``), ``"p"``, ``"e^alpha"``, ``"e^-alpha"`` or ``"e^alpha/2"``.

    Creation beyond ``e_max`` is dropped and counted as a truncation event.
    """
    out: dict[FockState, Any] = {}
    events = 0

    def put(s, c):
        out[s] = out[s] + c if s in out else c

    for s, c in v.items():
        if mode == "p":
            if s.m:
                put(s, c * s.m)
        elif isinstance(mode, str):
            shifts = {"e^alpha": 2, "e^-alpha": -2, "e^alpha/2": 1}
            if mode not in shifts:
                raise FockError(f"unknown Heisenberg generator {mode!r}")
            put(FockState(s.m + shifts[mode], s.parts), c)
        elif mode < 0:
            n = -mode
            if e_max is not None and s.energy + n > e_max:
                events += 1
                continue
            put(FockState(s.m, s.parts + (n,)), c)
        elif mode > 0:
            mult = s.multiplicities()
            r = mult.get(mode, 0)
            if r:
                mult[mode] = r - 1
                put(FockState.from_multiplicities(s.m, mult), c * (mode * r))
        else:
            raise FockError("a_0 is not diagonal on this basis; use the charge shifts")
    return ActResult(FockVector(out), events)


# ---------------------------------------------------------------------------
# series used inside vertex operators


_SER_CTX = flint.fmpq_mpoly_ctx.get(("w", HBAR), "deglex")
_W, _H = _SER_CTX.gens()


class _Ser:
    """``w**(-off) * p(w, hbar)`` with ``w = u`` (exact) or ``w = 1/u`` (truncated at ``cap``)."""

    __slots__ = ("p", "off", "cap", "inv")

    def __init__(self, p, off: int = 0, cap: int | None = None, inv: bool = False):
        self.p = p
        self.off = off
        self.cap = cap
        self.inv = inv
        if cap is not None:
            self._trunc()

    def _trunc(self):
        if self.p.is_zero():
            return
        if self.p.degrees()[0] - self.off > self.cap:
            d = {e: c for e, c in self.p.to_dict().items() if e[0] - self.off <= self.cap}
            self.p = _SER_CTX.from_dict(d)

    @classmethod
    def const(cls, c=1):
        return cls(_SER_CTX.constant(c))

    def _merge(self, other: "_Ser"):
        if self.inv != other.inv and not (self.is_const() or other.is_const()):
            raise FockError("cannot combine series in u and 1/u")
        inv = self.inv if not self.is_const() else other.inv
        if self.cap is None:
            cap = other.cap
        elif other.cap is None:
            cap = self.cap
        else:
            cap = min(self.cap, other.cap)
        return inv, cap

    def is_const(self) -> bool:
        return self.off == 0 and self.p.is_constant() and self.cap is None

    def __mul__(self, other):
        if isinstance(other, _Ser):
            inv, cap = self._merge(other)
            return _Ser(self.p * other.p, self.off + other.off, cap, inv)
        if isinstance(other, Fraction):
            other = flint.fmpq(other.numerator, other.denominator)
        return _Ser(self.p * other, self.off, self.cap, self.inv)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, _Ser):
            other = _Ser.const(other)
        inv, cap = self._merge(other)
        off = max(self.off, other.off)
        a = self.p * _W ** (off - self.off) if off != self.off else self.p
        b = other.p * _W ** (off - other.off) if off != other.off else other.p
        return _Ser(a + b, off, cap, inv)

    __radd__ = __add__

    def __neg__(self):
        return _Ser(-self.p, self.off, self.cap, self.inv)

    def __pow__(self, k: int):
        if k < 0:
            raise FockError("negative power of a series")
        out = _Ser.const(1)
        out.inv = self.inv
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self.p.is_zero()
        return NotImplemented

    __hash__ = None

    def powers(self) -> dict[int, flint.fmpq_poly]:
        """``{power of u: coefficient in Q[hbar]}``."""
        out: dict[int, list] = {}
        for (ew, eh), c in self.p.to_dict().items():
            pw = ew - self.off
            power = -pw if self.inv else pw
            out.setdefault(power, {})[eh] = c
        res = {}
        for power, d in out.items():
            coeffs = [flint.fmpq(0)] * (max(d) + 1)
            for eh, c in d.items():
                coeffs[eh] = c
            res[power] = HPoly(coeffs)
        return res

    def lowest_known(self) -> int | None:
        """Lowest u-power that is exact (None when exact everywhere)."""
        if self.cap is None:
            return None
        return -self.cap if self.inv else None

    @classmethod
    def from_laurent(cls, s: TruncatedLaurent) -> "_Ser":
        if s.side is not Side.AT_INFINITY:
            raise FockError("vertex coefficients must be expansions at infinity")
        if s.lo is None:
            if not s.coeffs:
                return cls(_SER_CTX.constant(0))
            off = max(0, -min(s.coeffs))
            d = {}
            for p, c in s.coeffs.items():
                for (eh,), v in _hbar_terms(c):
                    d[(p + off, eh)] = d.get((p + off, eh), 0) + v
            return cls(_SER_CTX.from_dict(d), off)
        if any(p > 0 for p in s.coeffs):
            raise FockError("truncated vertex coefficients must have no positive powers")
        d = {}
        for p, c in s.coeffs.items():
            for (eh,), v in _hbar_terms(c):
                d[(-p, eh)] = d.get((-p, eh), 0) + v
        return cls(_SER_CTX.from_dict(d), 0, -s.lo, True)

    def to_laurent(self, var: str = "u") -> TruncatedLaurent:
        coeffs = {p: hpoly_to_scalar(c) for p, c in self.powers().items()}
        return TruncatedLaurent(var, coeffs, self.lowest_known(), None, Side.AT_INFINITY)


def _hbar_terms(c) -> list[tuple[tuple[int], flint.fmpq]]:
    if isinstance(c, ScalarPoly):
        i = c.variables.index(HBAR)
        out = []
        for m, v in c.terms():
            if any(e for j, e in enumerate(m) if j != i):
                raise FockError("vertex coefficients may only depend on hbar")
            out.append(((m[i],), flint.fmpq(v.numerator, v.denominator)))
        return out
    c = to_fraction(c)
    return [((0,), flint.fmpq(c.numerator, c.denominator))]


def ser_u(power: int = 1, coeff: Any = 1) -> _Ser:
    """Exact monomial ``coeff * u**power`` (coeff may involve hbar)."""
    s = TruncatedLaurent("u", {power: coeff if isinstance(coeff, ScalarPoly) else ScalarPoly(coeff)})
    return _Ser.from_laurent(s)


def ser_poly(p: Callable) -> _Ser:
    """Build an exact series from a function of the generators ``(u, hbar)`` of the series ring."""
    return _Ser(p(_W, _H))


def ser_inv_series(p: Callable, cap: int) -> _Ser:
    """Build a series in ``t = 1/u`` from a function of ``(t, hbar)``, truncated at ``t**cap``."""
    return _Ser(p(_W, _H), 0, cap, True)


def ser_geometric_inverse(s: _Ser, cap: int) -> _Ser:
    """``1/s`` for a series in ``1/u`` with constant term 1."""
    if not s.inv and not s.is_const():
        raise FockError("inverse only for series in 1/u")
    one = _Ser.const(1)
    one.inv = True
    r = one + (-s)  # 1 - s, no constant term
    r = _Ser(r.p, 0, cap, True)
    acc = _Ser(one.p, 0, cap, True)
    term = acc
    while True:
        term = term * r
        if term.p.is_zero():
            break
        acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# normal-ordered exponentials


Coeff = Any


@dataclass
class VertexOpSpec:
    """``prefactor * exp(sum c_n a_{-n}/n) exp(sum d_n a_n/n) e^{shift} phi^{p}``.

    ``creation(n)`` and ``annihilation(n)`` return the coefficient of
    ``a_{-n}/n`` and ``a_n/n``; ``weight_factor(m)`` returns the scalar that
    ``phi^p`` produces on a weight-``m`` state.  Coefficients are either all
    series (exact mode) or all complex numbers (numeric mode).  ``phi_degree``
    is the top u-power of ``phi``; creation coefficients must have u-degree at
    most ``n`` and annihilation coefficients u-degree at most ``-n``, which
    gives the energy-transfer bound used to decide trusted entries.
    """

    name: str
    creation: Callable[[int], Coeff] | None
    annihilation: Callable[[int], Coeff] | None
    weight_shift: int
    weight_factor: Callable[[int], Coeff] | None = None
    prefactor: Coeff = 1
    phi_degree: int = 0
    numeric: bool = False
    _ccache: dict = field(default_factory=dict, repr=False, compare=False)
    _dcache: dict = field(default_factory=dict, repr=False, compare=False)

    def one(self):
        return 1 if self.numeric else _Ser.const(1)

    def c(self, n: int):
        if n not in self._ccache:
            self._ccache[n] = self.creation(n)
        return self._ccache[n]

    def d(self, n: int):
        if n not in self._dcache:
            self._dcache[n] = self.annihilation(n)
        return self._dcache[n]

    def transfer_bound(self, power: int, m: int) -> int:
        """Upper bound on ``E_in - E_out`` for the coefficient of ``u**power`` on weight ``m``."""
        return self.phi_degree * m - power


@lru_cache(maxsize=None)
def _monomials_up_to(e_max: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Multiplicity tuples ((n, r_n), ...) for all partitions of energy <= e_max."""
    out = []
    for e in range(e_max + 1):
        for lam in partitions(e):
            out.append(tuple(sorted(Counter(lam).items())))
    return tuple(out)


def _creation_table(spec: VertexOpSpec, e_max: int) -> list[tuple[int, tuple[tuple[int, int], ...], Any]]:
    """``exp(sum c_n x_n / n)`` coefficients on every monomial of energy <= e_max."""
    key = ("creation", e_max)
    if key in spec._ccache:
        return spec._ccache[key]
    table = []
    for mono in _monomials_up_to(e_max):
        coeff = spec.one()
        for n, r in mono:
            coeff = coeff * spec.c(n) ** r * Fraction(1, n ** r * factorial(r))
        energy = sum(n * r for n, r in mono)
        table.append((energy, mono, coeff))
    spec._ccache[key] = table
    return table


def vertex_column(spec: VertexOpSpec, state: FockState, e_max: int,
                  allow_high_input: bool = False) -> tuple[dict[FockState, Any], int]:
    """Raw image of a basis state: ``{out_state: series or number}`` and the number of dropped monomials.

    Annihilation acts as the translation ``x_n -> x_n + d_n`` on the monomial,
    then the weight factor and charge shift, then creation (kept up to e_max).
    With ``allow_high_input`` the input may lie above ``e_max``; only outputs are capped.
    """
    if state.energy > e_max and not allow_high_input:
        raise FockError(f"state energy {state.energy} exceeds e_max {e_max}")
    one = spec.one()
    # annihilation: prod_n (x_n + d_n)^{r_n}
    partial: dict[tuple[tuple[int, int], ...], Any] = {(): one}
    for n, r in sorted(state.multiplicities().items()):
        nxt: dict = {}
        for rem, coef in partial.items():
            for keep in range(r + 1):
                if keep < r:
                    if spec.annihilation is None:
                        continue
                    dn = spec.d(n)
                    if _is_zero(dn):
                        continue
                    term = coef * dn ** (r - keep) * comb(r, keep)
                else:
                    term = coef
                key = rem + ((n, keep),) if keep else rem
                nxt[key] = nxt[key] + term if key in nxt else term
        partial = nxt
    scalar = spec.prefactor
    if spec.weight_factor is not None:
        scalar = spec.weight_factor(state.m) * scalar if not spec.numeric else scalar * spec.weight_factor(state.m)
    m_out = state.m + spec.weight_shift
    table = _creation_table(spec, e_max) if spec.creation is not None else [(0, (), one)]
    out: dict[FockState, Any] = {}
    dropped = 0
    for rem, coef in partial.items():
        if _is_zero(coef):
            continue
        e_rem = sum(n * r for n, r in rem)
        if e_rem > e_max:
            dropped += 1
            continue
        coef = coef * scalar
        base = dict(rem)
        for energy, mono, c in table:
            if e_rem + energy > e_max:
                dropped += 1
                continue
            mult = dict(base)
            for n, r in mono:
                mult[n] = mult.get(n, 0) + r
            s = FockState.from_multiplicities(m_out, mult)
            t = coef * c
            out[s] = out[s] + t if s in out else t
    return {s: c for s, c in out.items() if not _is_zero(c)}, dropped


@dataclass
class VertexImage:
    """Series-valued image of a basis state under a vertex operator."""

    spec_name: str
    source: FockState
    terms: dict[FockState, TruncatedLaurent]
    truncation_events: int
    window: tuple[int | None, int | None]

    def states(self) -> list[FockState]:
        return sorted(self.terms, key=FockState.sort_key)


def apply_vertex(spec: VertexOpSpec, state: FockState, cutoffs: Cutoffs) -> VertexImage:
    """Apply a normal-ordered exponential to one basis state.

    Output states up to ``cutoffs.e_max`` are exact; higher-energy output is
    counted in ``truncation_events``.
    """
    if spec.numeric:
        raise FockError("apply_vertex returns series; use vertex_column for numeric operators")
    raw, dropped = vertex_column(spec, state, cutoffs.e_max)
    lo = None
    terms = {}
    for s, ser in raw.items():
        tl = ser.to_laurent()
        terms[s] = tl
        lo = tl.lo if lo is None else max(lo, tl.lo) if tl.lo is not None else lo
    return VertexImage(spec.name, state, terms, dropped, (lo, None))


def mode_coefficient(applied: VertexImage, k: int) -> FockVector:
    """Coefficient of ``u**(-k-1)`` as an exact vector with ``Q[hbar]`` coefficients."""
    power = -k - 1
    out = {}
    for s, tl in applied.terms.items():
        c = tl[power]  # raises TruncationError outside the window
        if not _is_zero(c):
            out[s] = scalar_to_hpoly(c)
    return FockVector(out)


def power_coefficient(applied: VertexImage, power: int) -> FockVector:
    """Coefficient of ``u**power``."""
    return mode_coefficient(applied, -power - 1)


# ---------------------------------------------------------------------------
# shift automorphism


def shift_image(state: FockState, degree: int) -> dict[int, FockVector]:
    """``{j: T_j |state>}`` where ``e^{gamma d} = sum_j gamma^j T_j`` and ``j <= degree``.

    ``e^{gamma d}`` sends ``a_{-n}`` to ``sum_k binom(n+k-1, k) gamma^k a_{-(n+k)}``
    and the weight-``m`` vacuum to ``exp(m sum_j gamma^j a_{-j}/j)|m>``; each
    ``T_j`` raises the energy by exactly ``j``.
    """
    # polynomial in gamma with coefficients dict[monomial parts -> Fraction]
    layers: list[dict[tuple[int, ...], Fraction]] = [dict() for _ in range(degree + 1)]
    layers[0][()] = Fraction(1)

    def mul_factor(layers, factor: list[dict[tuple[int, ...], Fraction]]):
        out = [dict() for _ in range(degree + 1)]
        for i, L in enumerate(layers):
            if not L:
                continue
            for j, F in enumerate(factor):
                if i + j > degree:
                    break
                for mono, c in L.items():
                    for fm, fc in F.items():
                        key = tuple(sorted(mono + fm, reverse=True))
                        out[i + j][key] = out[i + j].get(key, 0) + c * fc
        return out

    # vacuum dressing exp(m sum_j gamma^j x_j / j), expanded by gamma-degree
    if state.m:
        m = state.m
        # log series layers: degree j -> {(j,): m/j}
        for j in range(1, degree + 1):
            # exp of single term g^j * (m/j) x_j
            factor = [dict() for _ in range(degree + 1)]
            r = 0
            while r * j <= degree:
                factor[r * j][(j,) * r] = Fraction(m, j) ** r / factorial(r)
                r += 1
            layers = mul_factor(layers, factor)
    for n in state.parts:
        factor = [dict() for _ in range(degree + 1)]
        for k in range(degree + 1):
            factor[k][(n + k,)] = Fraction(comb(n + k - 1, k))
        layers = mul_factor(layers, factor)
    out = {}
    for j, L in enumerate(layers):
        vec = {FockState(state.m, mono): hpoly_const(c) for mono, c in L.items() if c}
        out[j] = FockVector(vec)
    return out


@dataclass(frozen=True)
class GenTerm:
    """``coeff * gamma**power * generator`` where generator is ``("a", n)``, ``("p",)`` or ``("a0",)``."""

    coeff: Fraction
    power: int
    generator: tuple


def shift_conjugate(target: tuple, degree: int) -> list[GenTerm]:
    """``e^{gamma d} target e^{-gamma d}`` as a combination of Heisenberg generators, up to ``gamma**degree``.

    ``target`` is ``("a", n)`` for ``n != 0``, ``("p",)`` or ``("a0",)``.
    """
    kind = target[0]
    if kind == "p":
        return [GenTerm(Fraction(1), 0, ("p",))]
    if kind == "a0":
        out = [GenTerm(Fraction(1), 0, ("a0",))]
        out += [GenTerm(Fraction(2, n), n, ("a", -n)) for n in range(1, degree + 1)]
        return out
    if kind != "a":
        raise FockError(f"unknown generator {target!r}")
    n = target[1]
    if n < 0:
        n = -n
        return [GenTerm(Fraction(comb(n + k - 1, k)), k, ("a", -(n + k))) for k in range(degree + 1)]
    if n == 0:
        raise FockError("use ('a0',) for the zero mode")
    out = [GenTerm(Fraction((-1) ** k * comb(n, k)), k, ("a", n - k)) for k in range(min(n - 1, degree) + 1)]
    if n <= degree:
        out.append(GenTerm(Fraction((-1) ** n), n, ("p",)))
    return out


def act_generator(gen: tuple, v: FockVector, e_max: int | None = None) -> ActResult:
    if gen[0] == "p":
        return heisenberg_act("p", v, e_max)
    if gen[0] == "a":
        return heisenberg_act(gen[1], v, e_max)
    raise FockError(f"generator {gen!r} has no action on the monomial basis")


def iter_sector_states(sector: int, cutoffs: Cutoffs) -> Iterator[FockState]:
    yield from basis(sector, cutoffs)

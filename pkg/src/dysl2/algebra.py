"""Exact scalar arithmetic: polynomials, rational functions and truncated Laurent series.

Polynomials are backed by python-flint's ``fmpq_mpoly`` (graded lexicographic
order).  A :class:`TruncatedLaurent` carries an explicit window of trusted
powers; coefficients outside it are unknown, never zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Any, Callable, Iterable, Mapping

import flint

BigRat = Fraction

HBAR = "hbar"


class AlgebraError(ArithmeticError):
    pass


class TruncationError(AlgebraError):
    """Requested coefficient or window lies outside what is known."""


def to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    return Fraction(c)


def _fmpq(c) -> flint.fmpq:
    c = to_fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def gbinom(a: int, j: int) -> Fraction:
    """Binomial coefficient ``a choose j`` for any integer ``a`` and ``j >= 0``."""
    if j < 0:
        return Fraction(0)
    if a >= 0:
        return Fraction(comb(a, j))
    # (-1)^j C(j - a - 1, j)
    return Fraction((-1) ** j * comb(j - a - 1, j))


def _ctx(variables: tuple[str, ...]):
    return flint.fmpq_mpoly_ctx.get(variables, "deglex")


class ScalarPoly:
    """Polynomial with rational coefficients in a fixed tuple of named variables."""

    __slots__ = ("_p", "variables")

    def __init__(self, value: Any = 0, variables: Iterable[str] = (HBAR,)):
        variables = tuple(variables)
        if HBAR not in variables:
            variables = variables + (HBAR,)
        self.variables = variables
        ctx = _ctx(variables)
        if isinstance(value, flint.fmpq_mpoly):
            self._p = value if value.context() is ctx else value.project_to_context(ctx)
        elif isinstance(value, ScalarPoly):
            self._p = value._p.project_to_context(ctx)
        elif isinstance(value, Mapping):
            self._p = ctx.from_dict({tuple(k): _fmpq(c) for k, c in value.items() if c != 0})
        else:
            self._p = ctx.constant(_fmpq(value))

    @classmethod
    def var(cls, name: str, variables: Iterable[str] = (HBAR,)) -> "ScalarPoly":
        variables = tuple(variables)
        if name not in variables:
            variables = variables + (name,)
        p = cls(0, variables)
        return cls(p._p.context().gen(p.variables.index(name)), p.variables)

    @classmethod
    def _wrap(cls, raw, variables) -> "ScalarPoly":
        obj = cls.__new__(cls)
        obj._p = raw
        obj.variables = variables
        return obj

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> tuple[Any, Any, tuple[str, ...]]:
        if isinstance(other, ScalarPoly):
            if other.variables == self.variables:
                return self._p, other._p, self.variables
            merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
            ctx = _ctx(merged)
            return self._p.project_to_context(ctx), other._p.project_to_context(ctx), merged
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return self._p, _fmpq(other), self.variables
        return NotImplemented, None, ()

    def __add__(self, other):
        a, b, vs = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return ScalarPoly._wrap(a + b, vs)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, vs = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return ScalarPoly._wrap(a - b, vs)

    def __rsub__(self, other):
        a, b, vs = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return ScalarPoly._wrap(b - a, vs)

    def __mul__(self, other):
        a, b, vs = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return ScalarPoly._wrap(a * b, vs)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarPoly._wrap(-self._p, self.variables)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        return ScalarPoly._wrap(self._p ** n, self.variables)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, flint.fmpq)):
            if other == 0:
                raise ZeroDivisionError("division of a polynomial by zero")
            return ScalarPoly._wrap(self._p * _fmpq(1 / to_fraction(other)), self.variables)
        return NotImplemented

    def exact_div(self, other: "ScalarPoly") -> "ScalarPoly":
        a, b, vs = self._coerce(other)
        if b == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        try:
            return ScalarPoly._wrap(a / b, vs)
        except flint.DomainError as exc:  # pragma: no cover - message passthrough
            raise AlgebraError(str(exc)) from None

    def __eq__(self, other):
        if isinstance(other, ScalarPoly):
            a, b, _ = self._coerce(other)
            return a == b
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return self._p == _fmpq(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self._p.to_dict().items(), key=repr))))

    def __bool__(self):
        return not self._p.is_zero()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    def constant_value(self) -> Fraction:
        if not self._p.is_constant():
            raise AlgebraError("polynomial is not constant")
        return to_fraction(self._p.coefficient(0)) if not self._p.is_zero() else Fraction(0)

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending graded-lexicographic order."""
        return [(tuple(int(e) for e in m), to_fraction(c)) for m, c in self._p.terms()]

    def to_dict(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.terms())

    def degree(self, var: str | None = None) -> int:
        if self._p.is_zero():
            return -1
        if var is None:
            return int(self._p.total_degree())
        if var not in self.variables:
            return 0
        return int(self._p.degrees()[self.variables.index(var)])

    def coefficients_in(self, var: str) -> dict[int, "ScalarPoly"]:
        """Split into ``{power of var: coefficient polynomial}``."""
        i = self.variables.index(var)
        out: dict[int, dict] = {}
        for m, c in self._p.terms():
            key = tuple(m[:i]) + (0,) + tuple(m[i + 1:])
            out.setdefault(int(m[i]), {})[key] = c
        ctx = self._p.context()
        return {k: ScalarPoly._wrap(ctx.from_dict(d), self.variables) for k, d in out.items()}

    def subs(self, **values) -> "ScalarPoly":
        """Substitute exact rational values for some variables."""
        if not values:
            return self
        return ScalarPoly._wrap(self._p.subs({k: _fmpq(v) for k, v in values.items()}), self.variables)

    def compose(self, **images: "ScalarPoly") -> "ScalarPoly":
        """Substitute polynomials for variables, e.g. ``p.compose(u=u + gamma)``."""
        merged = self.variables
        for img in images.values():
            if isinstance(img, ScalarPoly):
                merged = merged + tuple(v for v in img.variables if v not in merged)
        ctx = _ctx(merged)
        gens = []
        for name in self.variables:
            img = images.get(name)
            if img is None:
                gens.append(ctx.gen(merged.index(name)))
            elif isinstance(img, ScalarPoly):
                gens.append(img._p.project_to_context(ctx))
            else:
                gens.append(ctx.constant(_fmpq(img)))
        return ScalarPoly._wrap(self._p.project_to_context(_ctx(self.variables)).compose(*gens, ctx=ctx), merged)

    def evaluate(self, values: Mapping[str, Any]):
        """Numeric evaluation; exact when all values are rational."""
        total = 0
        for m, c in self.terms():
            term = c
            for name, e in zip(self.variables, m):
                if e:
                    term = term * values[name] ** e
            total = total + term
        return total

    def derivative(self, var: str) -> "ScalarPoly":
        if var not in self.variables:
            return ScalarPoly(0, self.variables)
        return ScalarPoly._wrap(self._p.derivative(var), self.variables)

    def to_json(self) -> list[list]:
        """Sorted monomial list ``[[exponents...], "p/q"]`` in grlex order."""
        return [[list(m), fraction_str(c)] for m, c in self.terms()]

    def __str__(self):
        return str(self._p)

    def __repr__(self):
        return f"ScalarPoly({self._p}, {self.variables})"


def fraction_str(c) -> str:
    c = to_fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_gens(*names: str, variables: Iterable[str] | None = None) -> tuple[ScalarPoly, ...]:
    """Generators of a polynomial ring; ``poly_gens('u', 'v')`` uses ``(u, v, hbar)``."""
    vs = tuple(variables) if variables is not None else tuple(names)
    if HBAR not in vs:
        vs = vs + (HBAR,)
    return tuple(ScalarPoly.var(n, vs) for n in names)


class RatFun:
    """Reduced quotient of two polynomials; the denominator is monic in grlex order."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if isinstance(num, RatFun) or isinstance(den, RatFun):
            q = RatFun._lift(num) / RatFun._lift(den)
            self.num, self.den = q.num, q.den
            return
        if not isinstance(num, ScalarPoly):
            num = ScalarPoly(num, den.variables if isinstance(den, ScalarPoly) else (HBAR,))
        if not isinstance(den, ScalarPoly):
            den = ScalarPoly(den, num.variables)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        a, b, vs = num._coerce(den)
        if a.is_zero():
            b = b.context().constant(1)
        else:
            g = a.gcd(b)
            if not g.is_constant():
                a, b = a / g, b / g
        lc = b.leading_coefficient()
        if lc != 1:
            a, b = a / lc, b / lc
        self.num = ScalarPoly._wrap(a, vs)
        self.den = ScalarPoly._wrap(b, vs)

    @property
    def variables(self):
        return self.num.variables

    @staticmethod
    def _lift(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, (ScalarPoly, int, Fraction)):
            return RatFun(x)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFun(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __pow__(self, n: int):
        if n >= 0:
            return RatFun(self.num ** n, self.den ** n)
        return RatFun(1) / RatFun(self.num ** (-n), self.den ** (-n))

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def subs(self, **values) -> "RatFun":
        den = self.den.subs(**values)
        if den.is_zero():
            raise ZeroDivisionError(f"pole at {values}")
        return RatFun(self.num.subs(**values), den)

    def compose(self, **images) -> "RatFun":
        return RatFun(self.num.compose(**images), self.den.compose(**images))

    def evaluate(self, values: Mapping[str, Any]):
        d = self.den.evaluate(values)
        if d == 0:
            raise ZeroDivisionError(f"pole at {dict(values)}")
        return self.num.evaluate(values) / d

    def __str__(self):
        if self.den == 1:
            return f"{self.num}"
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def ratfun_arith(a: RatFun, b: RatFun, op: str) -> RatFun:
    ops: dict[str, Callable] = {
        "+": lambda x, y: x + y,
        "-": lambda x, y: x - y,
        "*": lambda x, y: x * y,
        "/": lambda x, y: x / y,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](RatFun._lift(a), RatFun._lift(b))


class Side(enum.Enum):
    AT_INFINITY = "inf"  # series in var^-1, support bounded above
    AT_ZERO = "zero"  # series in var, support bounded below


@dataclass(frozen=True)
class ExpansionRegion:
    """Where a rational function is expanded.

    ``ExpansionRegion.dominant('u')`` is the region |u| > |v|, i.e. an
    expansion at infinity in ``u`` with other variables as coefficients.
    """

    side: Side
    var: str

    @classmethod
    def at_infinity(cls, var: str) -> "ExpansionRegion":
        return cls(Side.AT_INFINITY, var)

    @classmethod
    def at_zero(cls, var: str) -> "ExpansionRegion":
        return cls(Side.AT_ZERO, var)

    dominant = at_infinity


def _is_zero(c) -> bool:
    if isinstance(c, (ScalarPoly, RatFun, TruncatedLaurent)):
        return c.is_zero()
    return c == 0


class TruncatedLaurent:
    """Laurent series in one variable known exactly on a window of powers.

    ``lo``/``hi`` bound the trusted powers; ``None`` means no truncation on
    that side.  Powers outside ``[lo, hi]`` are unknown, except that an
    at-infinity series is zero above ``hi`` and an at-zero series is zero below
    ``lo``.
    """

    __slots__ = ("var", "coeffs", "lo", "hi", "side")

    def __init__(self, var: str, coeffs: Mapping[int, Any], lo: int | None = None,
                 hi: int | None = None, side: Side = Side.AT_INFINITY):
        self.var = var
        self.side = side
        self.lo = lo
        self.hi = hi
        self.coeffs = {
            p: c for p, c in coeffs.items()
            if not _is_zero(c) and (lo is None or p >= lo) and (hi is None or p <= hi)
        }
        if side is Side.AT_INFINITY and hi is not None and lo is None:
            # support must be bounded above; hi is then an exact top
            pass

    @classmethod
    def monomial(cls, var: str, power: int, coeff: Any = 1, side: Side = Side.AT_INFINITY):
        return cls(var, {power: coeff}, side=side)

    @classmethod
    def constant(cls, var: str, value: Any, side: Side = Side.AT_INFINITY):
        return cls(var, {0: value}, side=side)

    @property
    def exact(self) -> bool:
        return (self.lo is None if self.side is Side.AT_INFINITY else self.hi is None)

    def window(self) -> tuple[int | None, int | None]:
        return self.lo, self.hi

    def known(self, p: int) -> bool:
        return (self.lo is None or p >= self.lo) and (self.hi is None or p <= self.hi)

    def __getitem__(self, p: int):
        if not self.known(p):
            raise TruncationError(f"coefficient of {self.var}^{p} is outside window [{self.lo}, {self.hi}]")
        return self.coeffs.get(p, 0)

    def coefficient(self, p: int):
        return self[p]

    def top(self) -> int | None:
        return max(self.coeffs) if self.coeffs else None

    def bottom(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "TruncatedLaurent"):
        if other.var != self.var:
            raise AlgebraError(f"series in {self.var} and {other.var} do not combine")

    def _support_hi(self):
        """Upper bound of the support (None if unbounded)."""
        if self.side is Side.AT_INFINITY:
            return self.hi if self.hi is not None else self.top()
        return self.top() if self.hi is None else None

    def _support_lo(self):
        if self.side is Side.AT_ZERO:
            return self.lo if self.lo is not None else self.bottom()
        return self.bottom() if self.lo is None else None

    @staticmethod
    def _max(*xs):
        xs = [x for x in xs if x is not None]
        return max(xs) if xs else None

    @staticmethod
    def _min(*xs):
        xs = [x for x in xs if x is not None]
        return min(xs) if xs else None

    def _side_with(self, other):
        if self.exact and not other.exact:
            return other.side
        return self.side

    def __add__(self, other):
        if not isinstance(other, TruncatedLaurent):
            other = TruncatedLaurent.constant(self.var, other, self.side)
        self._check(other)
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out[p] + c if p in out else c
        return TruncatedLaurent(self.var, out, self._max(self.lo, other.lo),
                                self._min(self.hi, other.hi), self._side_with(other))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedLaurent(self.var, {p: -c for p, c in self.coeffs.items()}, self.lo, self.hi, self.side)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncatedLaurent":
        return TruncatedLaurent(self.var, {p: v * c for p, v in self.coeffs.items()}, self.lo, self.hi, self.side)

    def __mul__(self, other):
        if not isinstance(other, TruncatedLaurent):
            return self.scale(other)
        self._check(other)
        # trusted window of the product: every contributing pair must be known
        lo = hi = None
        a_hi, b_hi = self._support_hi(), other._support_hi()
        a_lo, b_lo = self._support_lo(), other._support_lo()
        if self.lo is not None or other.lo is not None:
            cands = []
            if self.lo is not None:
                if b_hi is None:
                    raise TruncationError("product of series truncated on opposite sides")
                cands.append(self.lo + b_hi)
            if other.lo is not None:
                if a_hi is None:
                    raise TruncationError("product of series truncated on opposite sides")
                cands.append(other.lo + a_hi)
            lo = max(cands)
        if self.hi is not None or other.hi is not None:
            cands = []
            if self.hi is not None:
                if b_lo is None:
                    raise TruncationError("product of series truncated on opposite sides")
                cands.append(self.hi + b_lo)
            if other.hi is not None:
                if a_lo is None:
                    raise TruncationError("product of series truncated on opposite sides")
                cands.append(other.hi + a_lo)
            hi = min(cands)
        out: dict[int, Any] = {}
        for p, c in self.coeffs.items():
            for q, d in other.coeffs.items():
                s = p + q
                if (lo is not None and s < lo) or (hi is not None and s > hi):
                    continue
                t = c * d
                out[s] = out[s] + t if s in out else t
        return TruncatedLaurent(self.var, out, lo, hi, self._side_with(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncatedLaurent.constant(self.var, 1, self.side)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, lo: int | None = None, hi: int | None = None) -> "TruncatedLaurent":
        return TruncatedLaurent(self.var, self.coeffs, self._max(self.lo, lo), self._min(self.hi, hi), self.side)

    def inverse(self, depth: int | None = None) -> "TruncatedLaurent":
        """Formal inverse; the dominant coefficient (top at infinity, bottom at zero) must be a unit."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero series")
        if self.side is Side.AT_INFINITY:
            lead_p = self.top()
            if self.lo is not None and lead_p < self.lo:
                raise TruncationError("leading coefficient not in the trusted window")
        else:
            lead_p = self.bottom()
        lead = self.coeffs[lead_p]
        inv_lead = _unit_inverse(lead)
        sign = -1 if self.side is Side.AT_INFINITY else 1
        # self = lead * x^lead_p * (1 + rest), rest has powers of sign direction
        rest = {(p - lead_p): c * inv_lead for p, c in self.coeffs.items() if p != lead_p}
        if self.side is Side.AT_INFINITY:
            known_lo = None if self.lo is None else self.lo - lead_p
            if known_lo is None and depth is None:
                if rest:
                    raise TruncationError("exact inverse of a non-monomial needs a depth")
            lo = known_lo if depth is None else self._max(known_lo, -depth)
            r = TruncatedLaurent(self.var, rest, lo, None, Side.AT_INFINITY)
        else:
            known_hi = None if self.hi is None else self.hi - lead_p
            if known_hi is None and depth is None and rest:
                raise TruncationError("exact inverse of a non-monomial needs a depth")
            hi = known_hi if depth is None else self._min(known_hi, depth)
            r = TruncatedLaurent(self.var, rest, None, hi, Side.AT_ZERO)
        # 1/(1+r) = sum (-r)^k, r has powers strictly in the sign direction
        acc = TruncatedLaurent(self.var, {0: 1}, r.lo, r.hi, r.side)
        term = acc
        neg_r = -r
        while True:
            # 1/(1+r) at a power only involves coefficients of r at higher powers
            term = (term * neg_r).truncate(r.lo, r.hi)
            if term.is_zero():
                break
            acc = acc + term
        _ = sign
        return TruncatedLaurent(self.var, {p - lead_p: c * inv_lead for p, c in acc.coeffs.items()},
                                None if acc.lo is None else acc.lo - lead_p,
                                None if acc.hi is None else acc.hi - lead_p, self.side)

    def __truediv__(self, other):
        if isinstance(other, TruncatedLaurent):
            return self * other.inverse()
        return self.scale(Fraction(1) / to_fraction(other)) if isinstance(other, (int, Fraction)) else self.scale(1 / other)

    def map(self, fn: Callable) -> "TruncatedLaurent":
        return TruncatedLaurent(self.var, {p: fn(c) for p, c in self.coeffs.items()}, self.lo, self.hi, self.side)

    def evaluate(self, value):
        """Sum of the stored terms at a numeric value of the variable."""
        return sum((c * value ** p for p, c in self.coeffs.items()), 0)

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        lo = self._max(self.lo, other.lo)
        hi = self._min(self.hi, other.hi)
        keys = set(self.coeffs) | set(other.coeffs)
        for p in keys:
            if (lo is not None and p < lo) or (hi is not None and p > hi):
                continue
            a = self.coeffs.get(p, 0)
            b = other.coeffs.get(p, 0)
            if not _is_zero(a - b):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        terms = " + ".join(f"({c})*{self.var}^{p}" for p, c in sorted(self.coeffs.items(), reverse=True))
        return f"TruncatedLaurent[{self.lo}, {self.hi}]({terms or '0'})"


def _unit_inverse(c):
    if isinstance(c, ScalarPoly):
        if not c.is_constant() or c.is_zero():
            raise AlgebraError("dominant coefficient is not a unit")
        return Fraction(1) / c.constant_value()
    if isinstance(c, RatFun):
        return RatFun(1) / c
    if isinstance(c, (int, Fraction)):
        if c == 0:
            raise AlgebraError("dominant coefficient is zero")
        return Fraction(1) / Fraction(c)
    return 1 / c


def laurent_expand(r, region: ExpansionRegion, window: tuple[int, int]) -> TruncatedLaurent:
    """Expand a rational function in ``region.var`` on the given window of powers.

    Coefficients are :class:`ScalarPoly` when the dominant denominator
    coefficient is a rational constant, otherwise :class:`RatFun`.
    """
    r = RatFun._lift(r)
    var = region.var
    lo, hi = window
    if var not in r.variables:
        c = r.num if r.is_polynomial() else r
        if r.is_polynomial():
            c = r.num.exact_div(r.den)
        return TruncatedLaurent(var, {0: c}, lo if region.side is Side.AT_INFINITY else None,
                                hi if region.side is Side.AT_ZERO else None, region.side)
    num = r.num.coefficients_in(var)
    den = r.den.coefficients_in(var)
    if region.side is Side.AT_INFINITY:
        d_top = max(den)
        lead = den[d_top]
    else:
        d_top = min(den)
        lead = den[d_top]
    if lead.is_constant():
        inv = Fraction(1) / lead.constant_value()

        def div(x):
            return x * inv
    else:
        lead_rf = RatFun(lead)
        num = {k: RatFun(v) for k, v in num.items()}
        den = {k: RatFun(v) for k, v in den.items()}

        def div(x):
            return x / lead_rf
    coeffs: dict[int, Any] = {}
    if region.side is Side.AT_INFINITY:
        top = max(num) - d_top
        if hi is not None and top > hi:
            raise TruncationError(f"expansion has powers up to {top}, above the window top {hi}")
        p = top
        while p >= lo:
            acc = num.get(p + d_top, 0)
            for i, d in den.items():
                if i == d_top:
                    continue
                q = p + d_top - i
                if q in coeffs:
                    acc = acc - d * coeffs[q]
            coeffs[p] = div(acc) if not _is_zero(acc) else 0
            p -= 1
        return TruncatedLaurent(var, coeffs, lo, None, Side.AT_INFINITY)
    bottom = min(num) - d_top
    if lo is not None and bottom < lo:
        raise TruncationError(f"expansion has powers down to {bottom}, below the window bottom {lo}")
    p = bottom
    while p <= hi:
        acc = num.get(p + d_top, 0)
        for i, d in den.items():
            if i == d_top:
                continue
            q = p + d_top - i
            if q in coeffs:
                acc = acc - d * coeffs[q]
        coeffs[p] = div(acc) if not _is_zero(acc) else 0
        p += 1
    return TruncatedLaurent(var, coeffs, None, hi, Side.AT_ZERO)


def series_shift(s: TruncatedLaurent, gamma) -> TruncatedLaurent:
    """``s(var + gamma)`` re-expanded in the same region.

    At infinity the trusted window is unchanged: the coefficient of ``var^q``
    only collects powers ``p >= q``.  At zero only exact (polynomial) series
    can be shifted.
    """
    if s.side is Side.AT_ZERO and s.hi is not None:
        raise TruncationError("shift of a truncated power series needs the unknown tail")
    if s.side is Side.AT_INFINITY and s.lo is None and any(p < 0 for p in s.coeffs):
        raise TruncationError("shift of negative powers needs a truncation window")
    out: dict[int, Any] = {}
    for p, c in s.coeffs.items():
        if p >= 0:
            js = range(p + 1)
        else:
            js = range(p - s.lo + 1)
        gpow = 1
        for j in js:
            b = gbinom(p, j)
            term = c * (gpow * b) if j else c
            q = p - j
            out[q] = out[q] + term if q in out else term
            gpow = gpow * gamma
    return TruncatedLaurent(s.var, out, s.lo, s.hi, s.side)


def series_exp(s: TruncatedLaurent, *, numeric: bool = False) -> TruncatedLaurent:
    """Exponential of a series with no constant term (any constant in numeric mode)."""
    c0 = s.coeffs.get(0, 0)
    if not _is_zero(c0):
        if not numeric:
            raise AlgebraError("exp of a series with nonzero constant term in exact mode")
        import cmath

        rest = TruncatedLaurent(s.var, {p: c for p, c in s.coeffs.items() if p != 0}, s.lo, s.hi, s.side)
        return series_exp(rest, numeric=True).scale(cmath.exp(c0))
    if s.side is Side.AT_INFINITY:
        if any(p > 0 for p in s.coeffs):
            raise TruncationError("exp of a series with positive powers is not an expansion at infinity")
        if s.lo is None and s.coeffs:
            raise TruncationError("exp of a nonzero series needs a truncation window")
    else:
        if any(p < 0 for p in s.coeffs):
            raise TruncationError("exp of a series with negative powers is not an expansion at zero")
        if s.hi is None and s.coeffs:
            raise TruncationError("exp of a nonzero series needs a truncation window")
    acc = TruncatedLaurent(s.var, {0: 1}, s.lo, s.hi, s.side)
    term = acc
    k = 0
    while True:
        k += 1
        term = (term * s).scale(Fraction(1, k)).truncate(s.lo, s.hi)
        if term.is_zero():
            break
        acc = acc + term
    return acc


def delta_truncation(u: str, v: str, window: tuple[int, int]) -> dict[tuple[int, int], int]:
    """Coefficients of the formal delta function sum_{n+m=-1} u^n v^m on a square window."""
    lo, hi = window
    return {(n, m): (1 if n + m == -1 else 0) for n in range(lo, hi + 1) for m in range(lo, hi + 1)}


def expand_bivariate(r: RatFun, first: str, second: str, window: tuple[int, int]) -> dict[tuple[int, int], Any]:
    """Expand in ``first`` at infinity, then each coefficient in ``second``.

    The inner expansion is at infinity if the coefficient is a Laurent
    polynomial in ``second``; coefficients must come out polynomial.
    """
    lo, hi = window
    outer = laurent_expand(r, ExpansionRegion.at_infinity(first), (lo, hi))
    out: dict[tuple[int, int], Any] = {}
    for p in range(lo, hi + 1):
        c = outer.coeffs.get(p, 0)
        if _is_zero(c):
            continue
        inner = laurent_expand(c, ExpansionRegion.at_infinity(second), (lo, hi))
        for q, d in inner.coeffs.items():
            if lo <= q <= hi:
                out[(p, q)] = d
    return out


def binomial_series(a: int, gamma, depth: int):
    """Coefficients ``[binom(a, j) * gamma**j for j < depth]``."""
    out = []
    g = 1
    for j in range(depth):
        out.append(gbinom(a, j) * g if j else 1)
        g = g * gamma
    return out


def exp_coefficients(n: int) -> list[Fraction]:
    return [Fraction(1, factorial(k)) for k in range(n + 1)]

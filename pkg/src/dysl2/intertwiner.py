"""Regularized vertex-operator intertwiner on the level-one Fock modules.

Everything here is complex floating point: the regularizing product over
``k = 0..N`` has no termwise expansion in ``hbar``.  Operators are sparse
column maps on a truncated Fock space; products sum intermediate states up to
an intermediate cutoff ``e_mid >= e_max``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .fock import Cutoffs, FockError, FockState, VertexOpSpec, basis, partitions, vacuum, vertex_column
from .representation import ColumnCache

POLE_EPS = 1e-9


class PoleError(ValueError):
    pass


def _check_pole(x: complex, what: str, eps: float = POLE_EPS):
    if abs(x) < eps:
        raise PoleError(f"{what} vanishes ({x!r})")


def gamma_ratio(z: complex, hbar: float) -> complex:
    """``Gamma(1/2 - z/2hbar) / Gamma(-z/2hbar)``."""
    s = -complex(z) / (2 * hbar)
    for arg in (s, s + 0.5):
        if abs(arg.imag) < POLE_EPS and arg.real < POLE_EPS and abs(arg.real - round(arg.real)) < POLE_EPS:
            raise PoleError(f"Gamma pole at argument {arg}")
    return complex(mpmath.gamma(s + 0.5) / mpmath.gamma(s))


def annihilation_coefficient(z: complex, hbar: float, N: int, n: int) -> complex:
    """Combined ``a_n/n`` coefficient of the ``N+1`` regularizing factors."""
    total = 0j
    for k in range(N + 1):
        total -= (z - 2 * k * hbar) ** (-n) - (z - hbar - 2 * k * hbar) ** (-n)
    return total


def phi_minus_spec(z: complex, hbar: float, N: int) -> VertexOpSpec:
    if N < 0:
        raise ValueError("N must be nonnegative")
    if hbar == 0:
        raise ValueError("hbar must be nonzero")
    z = complex(z)
    for k in range(N + 1):
        _check_pole(z - 2 * k * hbar, f"z - {2 * k}hbar")
        _check_pole(z - hbar - 2 * k * hbar, f"z - {2 * k + 1}hbar")
    g = gamma_ratio(z, hbar)
    two_h = complex(2 * hbar)
    return VertexOpSpec(
        "phi-",
        creation=lambda n: (z + hbar) ** n,
        annihilation=lambda n: annihilation_coefficient(z, hbar, N, n),
        weight_shift=1,
        weight_factor=lambda m: two_h ** (m / 2) * g ** m,
        numeric=True,
    )


def current_numeric_spec(family: str, u: complex, hbar: float) -> VertexOpSpec:
    """A current at a numeric spectral parameter, same normal-ordered form as the exact engine."""
    u = complex(u)
    if family == "e":
        return VertexOpSpec("e", creation=lambda n: (u - hbar) ** n + u ** n,
                            annihilation=lambda n: -u ** (-n), weight_shift=2,
                            weight_factor=lambda m: u ** m, numeric=True)
    if family == "f":
        return VertexOpSpec("f", creation=lambda n: -((u + hbar) ** n + u ** n),
                            annihilation=lambda n: u ** (-n), weight_shift=-2,
                            weight_factor=lambda m: u ** (-m), numeric=True)
    if family == "h-":
        return VertexOpSpec("h-", creation=lambda n: (u - hbar) ** n - (u + hbar) ** n,
                            annihilation=None, weight_shift=0, numeric=True)
    if family == "h+":
        _check_pole(u - hbar, "u - hbar")
        return VertexOpSpec("h+", creation=None,
                            annihilation=lambda n: (u - hbar) ** (-n) - u ** (-n),
                            weight_shift=0, weight_factor=lambda m: (u / (u - hbar)) ** m,
                            numeric=True)
    raise FockError(f"unknown current {family!r}")


class NumericOperator:
    """Columns of a numeric operator restricted to output energy ``<= e_mid``."""

    weight_shift: int

    def __init__(self, e_mid: int):
        self.e_mid = e_mid
        self._cols: dict[tuple[FockState, int], dict[FockState, complex]] = {}

    def _compute(self, state: FockState, e_out: int) -> dict[FockState, complex]:
        raise NotImplementedError

    def column(self, state: FockState, e_out: int | None = None) -> dict[FockState, complex]:
        e_out = self.e_mid if e_out is None else e_out
        key = (state, e_out)
        col = self._cols.get(key)
        if col is None:
            col = self._compute(state, e_out)
            self._cols[key] = col
        return col


class VertexNumeric(NumericOperator):
    def __init__(self, spec: VertexOpSpec, e_mid: int, scale: complex = 1):
        super().__init__(e_mid)
        self.spec = spec
        self.scale = scale
        self.weight_shift = spec.weight_shift

    def _compute(self, state, e_out):
        col, _ = vertex_column(self.spec, state, e_out, allow_high_input=True)
        if self.scale != 1:
            col = {s: c * self.scale for s, c in col.items()}
        return col


class HPolyNumeric(NumericOperator):
    """An exact mode operator (``hbar``-polynomial entries) evaluated at numeric ``hbar``."""

    def __init__(self, family: str, power: int, hbar: float, e_mid: int, weight_shift: int):
        super().__init__(e_mid)
        self.cache = ColumnCache(family, e_mid)
        self.power = power
        self.hbar = hbar
        self.weight_shift = weight_shift

    def _compute(self, state, e_out):
        out = {}
        for s, pw in self.cache.column(state).items():
            c = pw.get(self.power)
            if c is not None and c != 0 and s.energy <= e_out:
                out[s] = complex(sum(float(a) * self.hbar ** i for i, a in enumerate(c.coeffs())))
        return out


def apply_product(left: NumericOperator, right: NumericOperator, state: FockState,
                  e_out: int | None = None) -> dict[FockState, complex]:
    """``left * right`` on a basis state, intermediates truncated at ``right.e_mid``."""
    out: dict[FockState, complex] = {}
    for mid, a in right.column(state).items():
        if mid.energy > left.e_mid:
            continue
        for s, b in left.column(mid, e_out).items():
            out[s] = out.get(s, 0j) + a * b
    return out


@dataclass
class IntertwinerOp:
    """``Phi_-(z)`` (or the derived ``Phi_+``) with the parameters that built it."""

    z: complex
    hbar: float
    N: int
    cutoffs: Cutoffs
    e_mid: int
    kind: str = "minus"
    op: NumericOperator | None = None
    normalization: complex = 1
    f0: NumericOperator | None = None
    minus: "IntertwinerOp | None" = None

    @property
    def weight_shift(self) -> int:
        return 1 if self.kind == "minus" else -1

    def column(self, state: FockState) -> dict[FockState, complex]:
        if self.kind == "minus":
            return self.op.column(state)
        a = apply_product(self.minus.op, self.f0, state)
        b = apply_product(self.f0, self.minus.op, state)
        out = dict(a)
        for s, c in b.items():
            out[s] = out.get(s, 0j) - c
        return {s: c for s, c in out.items() if c != 0}

    def matrix_element(self, out: FockState, state: FockState) -> complex:
        return self.column(state).get(out, 0j)


def build_phi_minus(z: complex, hbar: float, N: int, cutoffs: Cutoffs | None = None,
                    e_mid: int | None = None) -> IntertwinerOp:
    cutoffs = cutoffs or Cutoffs(e_max=10, margin=4)
    e_mid = cutoffs.e_max + cutoffs.margin if e_mid is None else e_mid
    raw = VertexNumeric(phi_minus_spec(z, hbar, N), e_mid)
    norm = raw.column(vacuum(0)).get(vacuum(1), 0j)
    if abs(norm) < 1e-300:
        raise PoleError("vacuum matrix element vanishes; cannot normalize")
    op = VertexNumeric(raw.spec, e_mid, scale=1 / norm)
    return IntertwinerOp(complex(z), hbar, N, cutoffs, e_mid, "minus", op, 1 / norm)


def build_phi_plus(phi_minus: IntertwinerOp) -> IntertwinerOp:
    """``Phi_+ = Phi_- f_0 - f_0 Phi_-``."""
    if phi_minus.kind != "minus":
        raise ValueError("build_phi_plus expects a Phi_- operator")
    f0 = HPolyNumeric("f", -1, phi_minus.hbar, phi_minus.e_mid, -2)
    return IntertwinerOp(phi_minus.z, phi_minus.hbar, phi_minus.N, phi_minus.cutoffs,
                         phi_minus.e_mid, "plus", None, phi_minus.normalization, f0, phi_minus)


# ---------------------------------------------------------------------------
# intertwining equations

EQUATIONS = ("h+", "h-", "e")


def structure_ratio(eq: str, z: complex, u: complex, hbar: float) -> complex:
    """``Phi_-(z) X(u) = ratio * X(u) Phi_-(z)``."""
    if eq == "h+":
        return (u - z - 2 * hbar) / (u - z - hbar)
    if eq == "h-":
        return (u - z - hbar) / (u - z)
    if eq == "e":
        return 1 + 0j
    raise ValueError(eq)


def input_states(cutoffs: Cutoffs, weights: Iterable[int] = (0, 1)) -> list[FockState]:
    out = []
    for m in weights:
        out.extend(s for s in basis(m % 2, cutoffs) if s.m == m)
    return out


def relative_residual(lhs: complex, rhs: complex, floor: float = 1e-30) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor)


def weight_block(m: int, e_max: int) -> list[FockState]:
    """Basis states of weight ``m`` with energy ``<= e_max``, in basis order."""
    return [FockState(m, lam) for e in range(e_max + 1) for lam in partitions(e)]


def operator_block(op: NumericOperator, m: int, e_in: int, e_out: int) -> np.ndarray:
    """Dense matrix of ``op`` from weight ``m`` (energy ``<= e_in``) to energy ``<= e_out``."""
    key = ("block", m, e_in, e_out)
    hit = op._cols.get(key)
    if hit is not None:
        return hit
    cols = weight_block(m, e_in)
    rows = weight_block(m + op.weight_shift, e_out)
    index = {s: i for i, s in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=complex)
    for j, st in enumerate(cols):
        for t, c in op.column(st, e_out).items():
            mat[index[t], j] = c
    op._cols[key] = mat
    return mat


def equation_residual(phi: IntertwinerOp, eq: str, u: complex, weights: Iterable[int] = (0, 1),
                      current: NumericOperator | None = None,
                      ratio: complex | None = None) -> tuple[float, int]:
    """Max relative residual over matrix elements with input and output energy ``<= e_max``.

    Both orderings are products of truncated matrices with intermediate
    states up to ``phi.e_mid``.  ``ratio`` defaults to the structure function
    of the equation.
    """
    cur = current or VertexNumeric(current_numeric_spec(eq, u, phi.hbar), phi.e_mid)
    if ratio is None:
        ratio = structure_ratio(eq, phi.z, complex(u), phi.hbar)
    e_max, e_mid = phi.cutoffs.e_max, phi.e_mid
    worst, count = 0.0, 0
    for m in weights:
        lhs = operator_block(phi.op, m + cur.weight_shift, e_mid, e_max) @ operator_block(cur, m, e_max, e_mid)
        rhs = ratio * (operator_block(cur, m + 1, e_mid, e_max) @ operator_block(phi.op, m, e_max, e_mid))
        mask = (lhs != 0) | (rhs != 0)
        if not mask.any():
            continue
        scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-30)
        rel = np.abs(lhs - rhs) / scale
        rel = np.where(np.isnan(rel), np.inf, rel)
        worst = max(worst, float(rel[mask].max()))
        count += int(mask.sum())
    if count == 0:
        raise FockError("no matrix elements within the cutoffs")
    return worst, count


@dataclass
class ConvergenceReport:
    z: complex
    hbar: float
    tolerance: float
    rows: list[dict] = field(default_factory=list)

    def series(self, eq: str, u: float) -> list[tuple[int, float]]:
        return [(r["N"], r["residual"]) for r in self.rows if r["equation"] == eq and r["u"] == u]

    def decay_rate(self, eq: str, u: float) -> float | None:
        """Slope of ``log residual`` against ``log N`` (negative means decreasing)."""
        pts = [(n, r) for n, r in self.series(eq, u) if 0 < r < math.inf]
        if len(pts) < 2:
            return None
        x = np.log([p[0] for p in pts])
        y = np.log([p[1] for p in pts])
        return float(np.polyfit(x, y, 1)[0])

    def monotone(self, eq: str, u: float, noise: float = 1e-12) -> bool:
        seq = [r for _, r in sorted(self.series(eq, u))]
        return all(b <= a * (1 + 1e-9) + noise for a, b in zip(seq, seq[1:]))

    def final_residuals(self) -> dict[tuple[str, float], float]:
        out = {}
        for r in self.rows:
            key = (r["equation"], r["u"])
            if key not in out or r["N"] >= out[key][0]:
                out[key] = (r["N"], r["residual"])
        return {k: v[1] for k, v in out.items()}

    @property
    def passed(self) -> bool:
        finals = self.final_residuals()
        if not finals:
            return False
        return all(v <= self.tolerance for v in finals.values()) and all(
            self.monotone(eq, u) for eq, u in finals)

    def to_json(self) -> dict:
        return {
            "check": "intertwiner",
            "status": "pass" if self.passed else "fail",
            "z": [self.z.real, self.z.imag],
            "hbar": self.hbar,
            "tolerance": self.tolerance,
            "table": [[r["equation"], r["u"], r["N"], r["e_max"], r["e_mid"], r["residual"]]
                      for r in self.rows],
            "decay": {f"{eq}@{u}": self.decay_rate(eq, u) for eq, u in sorted(self.final_residuals())},
        }


def verify_phi_equations(z: complex, u_samples: Sequence[float], hbar: float = 1.0,
                         cutoffs: Cutoffs | None = None, Ns: Sequence[int] = (25, 50, 100, 200),
                         e_mid: int | None = None, tolerance: float = 1e-6,
                         equations: Sequence[str] = EQUATIONS) -> ConvergenceReport:
    cutoffs = cutoffs or Cutoffs(e_max=10, margin=4)
    report = ConvergenceReport(complex(z), hbar, tolerance)
    e_mid = cutoffs.e_max + cutoffs.margin if e_mid is None else e_mid
    currents = {(eq, u): VertexNumeric(current_numeric_spec(eq, u, hbar), e_mid)
                for u in u_samples for eq in equations}
    for N in Ns:
        phi = build_phi_minus(z, hbar, N, cutoffs, e_mid)
        for u in u_samples:
            for eq in equations:
                res, count = equation_residual(phi, eq, u, current=currents[(eq, u)])
                report.rows.append({"equation": eq, "u": u, "N": N, "e_max": cutoffs.e_max,
                                    "e_mid": phi.e_mid, "residual": res, "elements": count})
    return report


# ---------------------------------------------------------------------------
# closed-form contraction check


def _log_series(a: complex, b: complex) -> complex:
    """Analytic continuation of ``sum_n (a/b)^n / n``."""
    return -cmath.log(1 - a / b)


def contraction_ratio(eq: str, z: complex, u: complex, hbar: float, N: int) -> complex:
    """Scalar ``c`` with ``Phi_-(z) X(u) = c * X(u) Phi_-(z)`` at finite ``N``.

    Both orderings are normal-ordered with ``[a_n, a_{-m}] = n delta_{nm}``;
    divergent contraction sums are continued analytically, one regularizing
    factor at a time.
    """
    z, u = complex(z), complex(u)
    poles = [(z - 2 * k * hbar, z - hbar - 2 * k * hbar) for k in range(N + 1)]

    def through_phi_annihilation(creation_roots: list[tuple[complex, int]]) -> complex:
        # exp(sum_n D_n c_n / n) with c_n = sum sign * root^n
        total = 0j
        for b1, b2 in poles:
            for root, sign in creation_roots:
                total -= sign * (_log_series(root, b1) - _log_series(root, b2))
        return cmath.exp(total)

    def through_phi_creation(annihilation_roots: list[tuple[complex, int]]) -> complex:
        # exp(sum_n d_n (z + hbar)^n / n) with d_n = sum sign * root^{-n}
        total = 0j
        for root, sign in annihilation_roots:
            total += sign * _log_series(z + hbar, root)
        return cmath.exp(total)

    two_h = complex(2 * hbar)
    g = gamma_ratio(z, hbar)

    def phi_scalar(m):
        return two_h ** (m / 2) * g ** m

    m = 0
    if eq == "h+":
        # Phi h+ has nothing to reorder; h+ Phi reorders h+ annihilation past Phi creation
        weight = ((u / (u - hbar)) ** m) / ((u / (u - hbar)) ** (m + 1))
        return weight / through_phi_creation([(u - hbar, 1), (u, -1)])
    if eq == "h-":
        return through_phi_annihilation([(u - hbar, 1), (u + hbar, -1)])
    if eq == "e":
        lhs = through_phi_annihilation([(u - hbar, 1), (u, 1)]) * u ** m * phi_scalar(m + 2)
        rhs = through_phi_creation([(u, -1)]) * phi_scalar(m) * u ** (m + 1)
        return lhs / rhs
    raise ValueError(eq)


def contraction_defect(eq: str, z: complex, u: complex, hbar: float, N: int) -> float:
    """``|c / required - 1|``; zero when the equation holds exactly at this ``N``."""
    return abs(contraction_ratio(eq, z, u, hbar, N) / structure_ratio(eq, complex(z), complex(u), hbar) - 1)

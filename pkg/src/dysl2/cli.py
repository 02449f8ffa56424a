"""Command-line harness: ``verify``, ``dump`` and ``catalog``.

Reports are canonical JSON (sorted keys, fixed float repr) so that identical
configurations produce identical bytes.  Wall times are only written with
``--timings``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

SCHEMA = 1

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SuiteConfig:
    backend: str = "exact"
    e_max: int = 4
    m_window: tuple[int, int] = (-4, 4)
    u_window: tuple[int, int] = (-5, 2)
    margin: int = 0
    modes: int = 3
    gamma_degree: int = 3
    hbar: float = 1.0
    z: float = 0.3
    u_samples: tuple[float, ...] = (4.0, 6.0, 10.0)
    t_samples: tuple[float, ...] = (0.7, 1.3, 2.6)
    Ns: tuple[int, ...] = (25, 50, 100, 200)
    N_product: int = 10_000
    e_mid: int | None = None
    tolerance: float = 1e-6
    pole_eps: float = 1e-8
    ybe_points: int = 100
    checks: list[str] | None = None
    jobs: int = 1
    seed: int = 0
    out: str | None = None
    timings: bool = False

    def to_json(self) -> dict:
        d = {
            "backend": self.backend,
            "cutoffs": {"e_max": self.e_max, "m_window": list(self.m_window),
                        "u_window": list(self.u_window), "margin": self.margin,
                        "modes": self.modes, "gamma_degree": self.gamma_degree},
            "checks": list(self.checks or []),
            "seed": self.seed,
        }
        if self.backend == "numeric":
            d["numeric"] = {"hbar": self.hbar, "z": self.z, "u_samples": list(self.u_samples),
                            "t_samples": list(self.t_samples), "Ns": list(self.Ns),
                            "N_product": self.N_product, "e_mid": self.e_mid,
                            "tolerance": self.tolerance, "pole_eps": self.pole_eps}
        else:
            d["ybe_points"] = self.ybe_points
        return d


_CUTOFF_KEYS = {"e_max": int, "m_window": "pair", "u_window": "pair", "margin": int,
                "modes": int, "gamma_degree": int}
_NUMERIC_KEYS = {"hbar": float, "z": float, "u_samples": "floats", "t_samples": "floats",
                 "Ns": "ints", "N_product": int, "e_mid": "opt_int", "tolerance": float,
                 "pole_eps": float}
_TOP_KEYS = {"backend", "cutoffs", "numeric", "checks", "jobs", "seed", "out", "ybe_points"}


def _convert(path: str, value, kind):
    try:
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError
            return value
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError
            return float(value)
        if kind == "pair":
            if len(value) != 2 or not all(isinstance(v, int) for v in value):
                raise TypeError
            return (value[0], value[1])
        if kind == "floats":
            return tuple(_convert(path, v, float) for v in value)
        if kind == "ints":
            return tuple(_convert(path, v, int) for v in value)
        if kind == "opt_int":
            return None if value is None else _convert(path, value, int)
    except (TypeError, ValueError):
        pass
    raise ConfigError(path, f"invalid value {value!r}")


def config_from_dict(data: dict) -> SuiteConfig:
    if not isinstance(data, dict):
        raise ConfigError("$", "config must be a JSON object")
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(key, "unknown field")
    cfg = SuiteConfig()
    if "backend" in data:
        cfg.backend = data["backend"]
    for key, kind in _CUTOFF_KEYS.items():
        if key in data.get("cutoffs", {}):
            setattr(cfg, key, _convert(f"cutoffs.{key}", data["cutoffs"][key], kind))
    for key in data.get("cutoffs", {}):
        if key not in _CUTOFF_KEYS:
            raise ConfigError(f"cutoffs.{key}", "unknown field")
    if "numeric" in data:
        for key, val in data["numeric"].items():
            if key not in _NUMERIC_KEYS:
                raise ConfigError(f"numeric.{key}", "unknown field")
            setattr(cfg, key, _convert(f"numeric.{key}", val, _NUMERIC_KEYS[key]))
    if "checks" in data:
        if not isinstance(data["checks"], list):
            raise ConfigError("checks", "must be a list of check ids")
        cfg.checks = list(data["checks"])
    for key in ("jobs", "seed", "ybe_points"):
        if key in data:
            setattr(cfg, key, _convert(key, data[key], int))
    if "out" in data:
        cfg.out = data["out"]
    return cfg


def validate(cfg: SuiteConfig, numeric_given: bool = False) -> SuiteConfig:
    if cfg.backend not in ("exact", "numeric"):
        raise ConfigError("backend", f"must be 'exact' or 'numeric', got {cfg.backend!r}")
    if numeric_given and cfg.backend != "numeric":
        raise ConfigError("numeric", "numeric parameters require backend 'numeric'")
    if cfg.e_max < 0:
        raise ConfigError("cutoffs.e_max", "must be nonnegative")
    if cfg.margin < 0 or cfg.margin > cfg.e_max:
        raise ConfigError("cutoffs.margin", "must lie in [0, e_max]")
    for name in ("m_window", "u_window"):
        lo, hi = getattr(cfg, name)
        if lo > hi:
            raise ConfigError(f"cutoffs.{name}", "empty window")
    if cfg.modes < 0:
        raise ConfigError("cutoffs.modes", "must be nonnegative")
    if cfg.gamma_degree < 0:
        raise ConfigError("cutoffs.gamma_degree", "must be nonnegative")
    if cfg.jobs < 1:
        raise ConfigError("jobs", "must be at least 1")
    if cfg.tolerance <= 0:
        raise ConfigError("numeric.tolerance", "must be positive")
    if cfg.hbar == 0:
        raise ConfigError("numeric.hbar", "must be nonzero")
    if cfg.checks is None:
        cfg.checks = [c for c, spec in CHECKS.items() if spec.backend == cfg.backend]
    for i, c in enumerate(cfg.checks):
        if c not in CHECKS:
            raise ConfigError(f"checks[{i}]", f"unknown check id {c!r}")
    return cfg


# ---------------------------------------------------------------------------
# checks


def _cutoffs(cfg: SuiteConfig):
    from .fock import Cutoffs
    return Cutoffs(cfg.e_max, tuple(cfg.m_window), tuple(cfg.u_window), cfg.margin)


def _relation(rel_id: str) -> Callable[[SuiteConfig], list[dict]]:
    def run(cfg):
        from .representation import run_relation
        res = run_relation(rel_id, _cutoffs(cfg), range(-cfg.modes, cfg.modes + 1),
                           degree=cfg.gamma_degree)
        return [_residual_record(rel_id, res)]
    return run


def _residual_record(check_id: str, res) -> dict:
    rec = res.summary()
    rec["check"] = check_id
    rec["wall_time"] = res.wall_time
    return rec


def _merge_records(check_id: str, residuals: dict) -> dict:
    from .representation import Residual
    total = Residual(check_id)
    parts = {}
    for key in sorted(residuals):
        r = residuals[key]
        total.merge(r)
        total.wall_time += r.wall_time
        parts[key] = "pass" if r.passed else "fail"
    rec = _residual_record(check_id, total)
    rec["parameters"] = {"components": parts}
    return rec


def _eval_modes(cfg):
    from .evaluation import verify_defining_modes_eval
    return [_merge_records("eval-modes", verify_defining_modes_eval(K=4))]


def _ybe(kind: str):
    def run(cfg):
        from .evaluation import check_ybe
        res = check_ybe(kind, cfg.ybe_points, cfg.seed)
        return [_residual_record(f"ybe-{kind}", res)]
    return run


def _coproduct(cfg):
    from .evaluation import verify_coproduct_hom_and_intertwine
    return [_merge_records("coproduct", verify_coproduct_hom_and_intertwine())]


def _pairing(cfg):
    from .pairing import pairing_spotcheck
    res = pairing_spotcheck()
    return [_residual_record("pairing", res)]


UNIVERSAL_R_ABS = 1e-3
UNIVERSAL_R_RICHARDSON = 1e-8


def _universal_r(dual: bool):
    def run(cfg):
        from .evaluation import inverse_rho_scalar, reconstruct_universal_R
        t0 = time.perf_counter()
        rows, ok = [], True
        scalar = inverse_rho_scalar(cfg.hbar) if dual else None
        worst = 0.0
        for t in cfg.t_samples:
            rec = reconstruct_universal_R(t, cfg.N_product, cfg.hbar, scalar)
            good = (rec.error <= UNIVERSAL_R_ABS and rec.richardson_error <= UNIVERSAL_R_RICHARDSON
                    and 1.5 <= rec.decay_ratio <= 2.5)
            ok = ok and good
            worst = max(worst, rec.error)
            rows.append(rec.to_json() | {"status": "pass" if good else "fail"})
        name = "universal-r-dual" if dual else "universal-r"
        return [{"check": name, "status": "pass" if ok else "fail", "max_residual": worst,
                 "trusted": 16 * len(rows), "flagged": 0, "truncation_events": 0,
                 "parameters": {"N_product": cfg.N_product, "hbar": cfg.hbar, "samples": rows,
                                "reference": "Rbar/rho-" if dual else "rho- * Rbar"},
                 "wall_time": time.perf_counter() - t0}]
    return run


def _rho_anchor(cfg):
    from .evaluation import rho
    val = rho("-", cfg.hbar, cfg.hbar).real
    err = abs(val - 2 / math.pi) if cfg.hbar == 1.0 else float("nan")
    ok = err <= 1e-12
    return [{"check": "rho-anchor", "status": "pass" if ok else "fail", "max_residual": err,
             "trusted": 1, "flagged": 0, "truncation_events": 0,
             "parameters": {"value": val, "hbar": cfg.hbar}, "wall_time": 0.0}]


def _intertwiner(cfg):
    from .fock import Cutoffs
    from .intertwiner import verify_phi_equations
    t0 = time.perf_counter()
    cut = Cutoffs(cfg.e_max, tuple(cfg.m_window), tuple(cfg.u_window), cfg.margin)
    e_mid = cfg.e_mid if cfg.e_mid is not None else cfg.e_max + 4
    rep = verify_phi_equations(cfg.z, cfg.u_samples, cfg.hbar, cut, cfg.Ns, e_mid, cfg.tolerance)
    js = rep.to_json()
    worst = max((r["residual"] for r in rep.rows), default=0.0)
    return [{"check": "intertwiner", "status": js["status"], "max_residual": worst,
             "trusted": sum(r["elements"] for r in rep.rows), "flagged": 0, "truncation_events": 0,
             "parameters": {"z": cfg.z, "hbar": cfg.hbar, "table": js["table"], "decay": js["decay"],
                            "tolerance": cfg.tolerance},
             "wall_time": time.perf_counter() - t0}]


@dataclass(frozen=True)
class CheckSpec:
    backend: str
    anchor: str
    run: Callable[[SuiteConfig], list[dict]] = field(compare=False)


CHECKS: dict[str, CheckSpec] = {
    "ee": CheckSpec("exact", "Fock currents: e(u)e(v) exchange relation", _relation("ee")),
    "ff": CheckSpec("exact", "Fock currents: f(u)f(v) exchange relation", _relation("ff")),
    "h+e": CheckSpec("exact", "Fock currents: h+(u)e(v) exchange relation", _relation("h+e")),
    "h-e": CheckSpec("exact", "Fock currents: h-(u)e(v) exchange relation", _relation("h-e")),
    "h+f": CheckSpec("exact", "Fock currents: h+(u)f(v) exchange with central shift", _relation("h+f")),
    "h-f": CheckSpec("exact", "Fock currents: h-(u)f(v) exchange relation", _relation("h-f")),
    "h+h-": CheckSpec("exact", "Fock currents: h+(u)h-(v) exchange with central shift", _relation("h+h-")),
    "hh": CheckSpec("exact", "Fock currents: h+h+ and h-h- commute", _relation("hh")),
    "ef-delta": CheckSpec("exact", "Fock currents: [e(u), f(v)] as shifted delta functions", _relation("ef-delta")),
    "d-cov": CheckSpec("exact", "Fock currents: shift operator translates the spectral parameter", _relation("d-cov")),
    "shift-auto": CheckSpec("exact", "Heisenberg algebra: shift automorphism prescriptions", _relation("shift-auto")),
    "eval-modes": CheckSpec("exact", "evaluation module: defining mode relations", _eval_modes),
    "ybe-pure": CheckSpec("exact", "evaluation R-matrix: Yang-Baxter equation", _ybe("pure")),
    "ybe-mixed": CheckSpec("exact", "evaluation R-matrix: mixed Yang-Baxter equation", _ybe("mixed")),
    "coproduct": CheckSpec("exact", "coproduct: homomorphism and R-matrix intertwining", _coproduct),
    "pairing": CheckSpec("exact", "Hopf pairing: mode table and coproduct compatibility", _pairing),
    "universal-r": CheckSpec("numeric", "universal R in evaluation slots vs rho- * Rbar", _universal_r(False)),
    "universal-r-dual": CheckSpec("numeric", "universal R in evaluation slots vs Rbar / rho-", _universal_r(True)),
    "rho-anchor": CheckSpec("numeric", "scalar factor rho- at u = hbar equals 2/pi", _rho_anchor),
    "intertwiner": CheckSpec("numeric", "vertex-operator intertwiner equations", _intertwiner),
}


def _run_check(args: tuple[str, SuiteConfig]) -> list[dict]:
    check_id, cfg = args
    spec = CHECKS[check_id]
    if spec.backend != cfg.backend:
        return [{"check": check_id, "status": "skipped", "max_residual": "0", "trusted": 0,
                 "flagged": 0, "truncation_events": 0,
                 "parameters": {"reason": f"requires backend {spec.backend!r}"}, "wall_time": 0.0}]
    return spec.run(cfg)


def _canonical(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def run_suite(cfg: SuiteConfig) -> dict:
    tasks = [(c, cfg) for c in cfg.checks]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_check, tasks))
    else:
        results = [_run_check(t) for t in tasks]
    records = [r for group in results for r in group]
    if not cfg.timings:
        for r in records:
            r.pop("wall_time", None)
    status = "pass" if all(r["status"] != "fail" for r in records) else "fail"
    return _canonical({"schema": SCHEMA, "config": cfg.to_json(), "status": status, "checks": records})


def report_bytes(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()


# ---------------------------------------------------------------------------
# dumps


def dump_basis(e_max: int, sector: int, m_window=(-4, 4)) -> dict:
    from .fock import Cutoffs, basis
    states = basis(sector, Cutoffs(e_max, tuple(m_window)))
    return {"kind": "basis", "e_max": e_max, "sector": sector,
            "order": "energy, weight, partition (descending parts, lexicographic)",
            "states": [s.to_json() for s in states]}


def dump_series(family: str, m: int, parts: tuple[int, ...], window: tuple[int, int], e_max: int) -> dict:
    from .fock import Cutoffs, FockState, apply_vertex, coeff_to_json
    from .representation import current_spec
    lo, hi = window
    spec = current_spec(family, depth=max(-lo, 1) + 1)
    img = apply_vertex(spec, FockState(m, tuple(parts)), Cutoffs(e_max))
    rows = []
    for s in img.states():
        tl = img.terms[s]
        for p in range(lo, hi + 1):
            try:
                c = tl[p]
            except Exception:
                continue
            if c != 0:
                rows.append({"power": p, "state": s.to_json(), "coeff": coeff_to_json(c)})
    return {"kind": "series", "family": family, "source": {"m": m, "parts": list(parts)},
            "window": [lo, hi], "e_max": e_max, "coefficients": rows}


def dump_matrix(name: str, at: float | None, N: int) -> dict:
    from .evaluation import rbar, reconstruct_universal_R, symbols, universal_r_slots
    if name == "rbar":
        if at is None:
            (u,) = symbols("u")
            m = rbar(u)
        else:
            from .evaluation import rbar_h
            m = rbar_h(Fraction(at).limit_denominator(10**12), Fraction(1))
        return {"kind": "matrix", "name": name, "at": at, "entries": m.to_json()}
    if name == "universal-r":
        if at is None:
            raise ConfigError("selector", "universal-r needs a numeric --at value")
        m = universal_r_slots(at, N)
        return {"kind": "matrix", "name": name, "at": at, "N": N, "entries": m.to_json()}
    raise ConfigError("selector", f"unknown matrix {name!r}")


def dump_pairing(K: int) -> dict:
    from .pairing import TABLE
    return {"kind": "pairing-table"} | TABLE.to_json(K)


def to_csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    kind = data["kind"]
    if kind == "basis":
        w.writerow(["m", "partition"])
        for s in data["states"]:
            w.writerow([s["m"], " ".join(map(str, s["partition"]))])
    elif kind == "series":
        w.writerow(["power", "m", "partition", "coeff"])
        for r in data["coefficients"]:
            w.writerow([r["power"], r["state"]["m"], " ".join(map(str, r["state"]["partition"])),
                        json.dumps(r["coeff"])])
    elif kind == "matrix":
        for row in data["entries"]:
            w.writerow([json.dumps(x) if isinstance(x, list) else x for x in row])
    elif kind == "pairing-table":
        w.writerow(["upper", "lower", "value"])
        for row in data["modes"]:
            w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dysl2", description="Verification engine for the level-one Yangian double of sl2.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a suite of checks and write a JSON report")
    v.add_argument("--config", help="JSON configuration file")
    v.add_argument("--backend", choices=("exact", "numeric"))
    v.add_argument("--emax", type=int)
    v.add_argument("--modes", type=int, help="mode window K, modes k in [-K, K]")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--out", help="report path (default: stdout)")
    v.add_argument("--jobs", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--check", action="append", dest="checks", help="check id (repeatable)")
    v.add_argument("--timings", action="store_true", help="include wall times (breaks byte-determinism)")

    d = sub.add_parser("dump", help="write a data table")
    d.add_argument("kind", choices=("series", "matrix", "basis", "pairing-table"))
    d.add_argument("--family", default="e", choices=("e", "f", "h+", "h-"))
    d.add_argument("--m", type=int, default=0)
    d.add_argument("--parts", default="", help="partition, e.g. '2,1'")
    d.add_argument("--window", type=int, nargs=2, default=(-3, 3))
    d.add_argument("--emax", type=int, default=2)
    d.add_argument("--sector", type=int, default=0, choices=(0, 1))
    d.add_argument("--name", default="rbar")
    d.add_argument("--at", type=float)
    d.add_argument("--N", type=int, default=1000)
    d.add_argument("--K", type=int, default=3)
    d.add_argument("--format", default="json", choices=("json", "csv"))
    d.add_argument("--out")

    sub.add_parser("catalog", help="list check ids")
    return p


def _write(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verify(args) -> int:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("--config", str(exc)) from None
    cfg = config_from_dict(data)
    numeric_given = "numeric" in data
    for flag, attr in (("backend", "backend"), ("emax", "e_max"), ("modes", "modes"),
                       ("tolerance", "tolerance"), ("out", "out"), ("jobs", "jobs"),
                       ("seed", "seed"), ("checks", "checks")):
        val = getattr(args, flag)
        if val is not None:
            setattr(cfg, attr, val)
    cfg.timings = args.timings
    validate(cfg, numeric_given)
    report = run_suite(cfg)
    text = report_bytes(report).decode()
    _write(text, cfg.out)
    for r in report["checks"]:
        print(f"{r['status'].upper():7s} {r['check']}", file=sys.stderr)
    return EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


def _dump(args) -> int:
    if args.kind == "basis":
        data = dump_basis(args.emax, args.sector)
    elif args.kind == "series":
        try:
            parts = tuple(int(x) for x in args.parts.split(",") if x.strip())
        except ValueError:
            raise ConfigError("--parts", f"not a partition: {args.parts!r}") from None
        data = dump_series(args.family, args.m, parts, tuple(args.window), args.emax)
    elif args.kind == "matrix":
        data = dump_matrix(args.name, args.at, args.N)
    else:
        data = dump_pairing(args.K)
    data = _canonical(data)
    text = to_csv(data) if args.format == "csv" else json.dumps(data, sort_keys=True, indent=2) + "\n"
    _write(text, args.out)
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        if args.command == "dump":
            return _dump(args)
        for cid, spec in CHECKS.items():
            print(f"{cid:18s} {spec.backend:8s} {spec.anchor}")
        return EXIT_PASS
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

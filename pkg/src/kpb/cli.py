"""Command-line entry point ``kpb``.

Exit codes: 0 success, 1 computational error, 2 configuration error.
"""
import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import acceptance
from . import asymptotics as asy
from .errors import ComputationError, ConfigError, KPBError
from .operators import DEFAULT_N as OP_N
from .operators import BlochParams, build_A, build_L
from .scanner import (BISECT_TOL, BUBBLE_STEP, ScanError, collision_locator,
                      dispersion_curve, find_bubble, find_critical_ell, scan)
from .spectra import INV_TOL, RE_TOL, analyze, eig_general
from .waves import DEFAULT_N as WAVE_N
from .waves import DEFAULT_TOL, MAX_AMPLITUDE, ode_residual, solve_wave, wave_asymptotic

SCHEMA_VERSION = "1"
COMMANDS = ("wave", "spectrum", "scan", "boundary", "bubble", "collisions",
            "dispersion", "verify")
SCAN_COLUMNS = ("gamma", "ell", "max_re", "k_u", "n_L", "krein_ok")
DISPERSION_COLUMNS = ("k", "omega", "mu")

DEFAULTS = {
    "a": 0.1,
    "sigma": 1,
    "ell": None,
    "ell_range": None,
    "gamma": 0.0,
    "gamma_range": None,
    "n_trunc": OP_N,
    "wave_n": WAVE_N,
    "wave_tol": DEFAULT_TOL,
    "re_tol": RE_TOL,
    "inv_tol": INV_TOL,
    "bisect_tol": BISECT_TOL,
    "bracket": None,
    "coarse_step": BUBBLE_STEP,
    "pairs": "2:1,3:1,2:2",
    "k_range": None,
    "samples": 401,
    "out": None,
    "format": None,
    "quick": False,
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("argv", message)


def _range(text, key, with_count=True):
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(":")
    want = 3 if with_count else 2
    if len(parts) != want:
        form = "lo:hi:count" if with_count else "lo:hi"
        raise ConfigError(key, f"expected {form}, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2]) if with_count else None
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from exc
    if not lo < hi:
        raise ConfigError(key, "lo must be < hi")
    if with_count and count < 1:
        raise ConfigError(key, "count must be >= 1")
    return (lo, hi, count) if with_count else (lo, hi)


def _pairs(text):
    out = []
    for item in str(text).split(","):
        try:
            m, p = (int(v) for v in item.split(":"))
        except ValueError as exc:
            raise ConfigError("pairs", f"bad pair {item!r}, expected m:p") from exc
        if m < 1 or p < 1:
            raise ConfigError("pairs", "m and p must be >= 1")
        out.append((m, p))
    return out


def _build_parser():
    parser = _Parser(prog="kpb", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON object of default parameters")
    parser.add_argument("--a", type=float)
    parser.add_argument("--sigma", type=int)
    parser.add_argument("--ell", type=float)
    parser.add_argument("--ell-range", dest="ell_range", help="lo:hi:count")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--gamma-range", dest="gamma_range", help="lo:hi:count")
    parser.add_argument("--n-trunc", dest="n_trunc", type=int)
    parser.add_argument("--wave-n", dest="wave_n", type=int)
    parser.add_argument("--wave-tol", dest="wave_tol", type=float)
    parser.add_argument("--re-tol", dest="re_tol", type=float)
    parser.add_argument("--inv-tol", dest="inv_tol", type=float)
    parser.add_argument("--bisect-tol", dest="bisect_tol", type=float)
    parser.add_argument("--bracket", help="lo:hi in ell")
    parser.add_argument("--coarse-step", dest="coarse_step", type=float)
    parser.add_argument("--pairs", help="collision pairs m:p,m:p")
    parser.add_argument("--k-range", dest="k_range", help="lo:hi")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--quick", action="store_true", default=None)
    return parser


_FLOAT_KEYS = ("a", "ell", "gamma", "wave_tol", "re_tol", "inv_tol", "bisect_tol",
               "coarse_step")
_INT_KEYS = ("sigma", "n_trunc", "wave_n", "samples")


def _coerce(params):
    for keys, kind in ((_FLOAT_KEYS, float), (_INT_KEYS, int)):
        for key in keys:
            value = params[key]
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(key, f"expected a number, got {value!r}")
            if kind is int and value != int(value):
                raise ConfigError(key, f"expected an integer, got {value!r}")
            params[key] = kind(value)
            if not math.isfinite(params[key]):
                raise ConfigError(key, "must be finite")
    if not isinstance(params["quick"], bool):
        raise ConfigError("quick", "expected true or false")


def _validate(params):
    _coerce(params)
    a = params["a"]
    if abs(a) > MAX_AMPLITUDE:
        raise ConfigError("a", f"|a| must be <= {MAX_AMPLITUDE}")
    if params["sigma"] not in (1, -1):
        raise ConfigError("sigma", "must be +1 or -1")
    g = params["gamma"]
    if not -0.5 < g <= 0.5:
        raise ConfigError("gamma", "must lie in (-1/2, 1/2]")
    if params["ell"] is not None and params["ell"] < 0:
        raise ConfigError("ell", "must be >= 0")
    if params["n_trunc"] < 1:
        raise ConfigError("n_trunc", "must be >= 1")
    if params["wave_n"] < 8:
        raise ConfigError("wave_n", "must be >= 8")
    for key in ("wave_tol", "re_tol", "inv_tol", "bisect_tol", "coarse_step"):
        if not params[key] > 0:
            raise ConfigError(key, "must be positive")
    if params["samples"] < 2:
        raise ConfigError("samples", "must be >= 2")
    if params["ell_range"] is not None:
        params["ell_range"] = _range(params["ell_range"], "ell_range")
        if params["ell_range"][0] <= 0:
            raise ConfigError("ell_range", "ell must be > 0")
    if params["gamma_range"] is not None:
        lo, hi, n = _range(params["gamma_range"], "gamma_range")
        if not (-0.5 < lo and hi <= 0.5):
            raise ConfigError("gamma_range", "must lie in (-1/2, 1/2]")
        params["gamma_range"] = (lo, hi, n)
    if params["bracket"] is not None:
        params["bracket"] = _range(params["bracket"], "bracket", with_count=False)
    if params["k_range"] is not None:
        params["k_range"] = _range(params["k_range"], "k_range", with_count=False)
    params["pairs"] = _pairs(params["pairs"])
    if params["format"] not in (None, "csv", "json"):
        raise ConfigError("format", "must be csv or json")


def parse_config(argv):
    """Build a validated :class:`RunConfig`; flags override ``--config`` values."""
    ns = _build_parser().parse_args(argv)
    params = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                loaded = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError("config", str(exc)) from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be an object")
        for key, value in loaded.items():
            norm = key.replace("-", "_")
            if norm not in DEFAULTS:
                raise ConfigError(key, "unknown key")
            params[norm] = value
    for key in DEFAULTS:
        value = getattr(ns, key, None)
        if value is not None:
            params[key] = value
    _validate(params)
    return RunConfig(ns.command, params)


# ---------------------------------------------------------------- rendering

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x) + 0.0, ".17g")  # +0.0 folds -0 into 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def render_json(record):
    return json.dumps(_jsonable(record), indent=2, sort_keys=True) + "\n"


def render_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _record(cfg, results, provenance):
    echo = {k: v for k, v in cfg.params.items() if k not in ("out", "format")}
    return {"schema_version": SCHEMA_VERSION, "command": cfg.command,
            "config": echo, "results": results, "provenance": provenance}


# ---------------------------------------------------------------- commands

def _wave(cfg):
    return solve_wave(cfg["a"], cfg["wave_n"], cfg["wave_tol"])


def _provenance(cfg, w=None):
    prov = {"n_trunc": cfg["n_trunc"], "re_tol": cfg["re_tol"],
            "inv_tol": cfg["inv_tol"]}
    if w is not None:
        prov.update(wave_residual=w.residual, wave_n=w.n_trunc,
                    wave_tol=cfg["wave_tol"])
    return prov


def _ell_values(cfg):
    if cfg["ell_range"] is not None:
        lo, hi, n = cfg["ell_range"]
        return list(np.linspace(lo, hi, n))
    if cfg["ell"] is not None:
        return [cfg["ell"]]
    raise ConfigError("ell", "required (or ell_range)")


def _gamma_values(cfg):
    if cfg["gamma_range"] is not None:
        lo, hi, n = cfg["gamma_range"]
        return list(np.linspace(lo, hi, n))
    return [cfg["gamma"]]


def cmd_wave(cfg):
    w = _wave(cfg)
    asym = wave_asymptotic(cfg["a"])
    results = {
        "a": w.a, "k_sq": w.k_sq, "cos_amps": w.cos_amps,
        "residual": w.residual, "ode_residual": ode_residual(w, max(256, 4 * w.n_trunc)),
        "asymptotic": {"k_sq": asym.k_sq, "cos_amps": asym.cos_amps},
    }
    return _record(cfg, results, {"wave_n": w.n_trunc, "wave_tol": cfg["wave_tol"]}), None


def cmd_spectrum(cfg):
    if cfg["ell"] is None:
        raise ConfigError("ell", "required")
    w = _wave(cfg)
    p = BlochParams(cfg["sigma"], cfg["ell"], cfg["gamma"], cfg["n_trunc"])
    sr, nr, ok = analyze(w, p, cfg["re_tol"], cfg["inv_tol"])
    order = np.lexsort((sr.eigenvalues.imag, -sr.eigenvalues.real))
    results = {
        "eigenvalues": sr.eigenvalues[order],
        "max_real_part": sr.max_real_part,
        "unstable_count": sr.unstable_count,
        "off_axis_count": sr.off_axis_count,
        "symmetry_residual_imag_axis": sr.symmetry_residual_imag_axis,
        "symmetry_residual_real_axis": sr.symmetry_residual_real_axis,
        "negative_count": nr.negative_count,
        "l_min_abs_eigenvalue": nr.min_abs_eigenvalue,
        "l_invertible": nr.invertible,
        "krein_ok": ok,
    }
    return _record(cfg, results, _provenance(cfg, w)), None


def _scan_rows(records):
    return [(r.gamma, r.ell, r.max_real_part, r.unstable_count, r.negative_count,
             r.krein_ok) for r in records]


def cmd_scan(cfg):
    w = _wave(cfg)
    try:
        recs = scan(w, cfg["sigma"], _gamma_values(cfg), _ell_values(cfg),
                    cfg["n_trunc"], cfg["re_tol"], cfg["inv_tol"])
    except ValueError as exc:
        raise ConfigError("gamma/ell", str(exc)) from exc
    except ScanError as exc:
        exc.partial = (SCAN_COLUMNS, _scan_rows(exc.records))
        raise
    rows = _scan_rows(recs)
    results = {"columns": SCAN_COLUMNS, "rows": rows}
    return _record(cfg, results, _provenance(cfg, w)), (SCAN_COLUMNS, rows)


def cmd_boundary(cfg):
    w = _wave(cfg)
    bracket = cfg["bracket"]
    if bracket is None:
        if cfg["gamma"] != 0:
            raise ConfigError("bracket", "required when gamma != 0")
        ell_a = math.sqrt(asy.ell_a_sq(cfg["a"])) if cfg["a"] else 0.01
        bracket = (ell_a / 4, ell_a * 4)
    br = find_critical_ell(w, cfg["sigma"], cfg["gamma"], bracket,
                           cfg["bisect_tol"], cfg["n_trunc"], cfg["re_tol"])
    return _record(cfg, asdict(br), _provenance(cfg, w)), None


def cmd_bubble(cfg):
    w = _wave(cfg)
    gamma = cfg["gamma"]
    if gamma == 0:
        raise ConfigError("gamma", "bubble needs gamma in [0.05, 1/2]")
    try:
        b = find_bubble(w, gamma, cfg["coarse_step"], cfg["sigma"],
                        cfg["bisect_tol"], cfg["n_trunc"], cfg["re_tol"])
    except ValueError as exc:
        raise ConfigError("gamma", str(exc)) from exc
    return _record(cfg, asdict(b), _provenance(cfg, w)), None


def cmd_collisions(cfg):
    w0 = solve_wave(0.0, cfg["wave_n"])
    out = []
    for m, p in cfg["pairs"]:
        ell = collision_locator(m, p, sigma=cfg["sigma"])
        params = BlochParams(cfg["sigma"], ell, 0.0, max(cfg["n_trunc"], m, p))
        a_mat = build_A(w0, params)
        modes = list(a_mat.basis_modes)
        vals, vecs = eig_general(a_mat)
        i_m = int(np.argmax(np.abs(vecs[modes.index(m)])))
        i_p = int(np.argmax(np.abs(vecs[modes.index(-p)])))
        out.append({"m": m, "p": p, "ell": ell, "ell_sq": ell * ell,
                    "ell_mp_sq": asy.ell_mp_sq(m, p),
                    "omega_m": asy.omega_n(m, params),
                    "eigen_gap": abs(vals[i_m] - vals[i_p])})
    return _record(cfg, {"collisions": out}, _provenance(cfg)), None


def cmd_dispersion(cfg):
    if cfg["ell"] is None:
        raise ConfigError("ell", "required")
    if cfg["k_range"] is not None:
        ranges = [cfg["k_range"]]
    else:
        ranges = [(-2.0, -0.05), (0.05, 2.0)]
    try:
        rows = np.vstack([dispersion_curve(cfg["sigma"], cfg["ell"], r, cfg["samples"])
                          for r in ranges])
    except ValueError as exc:
        raise ConfigError("k_range", str(exc)) from exc
    rows = [tuple(r) for r in rows]
    results = {"columns": DISPERSION_COLUMNS, "rows": rows}
    return _record(cfg, results, {}), (DISPERSION_COLUMNS, rows)


def cmd_verify(cfg):
    checks = acceptance.run_all(quick=bool(cfg["quick"]))
    for c in checks:
        print(c.line(), file=sys.stderr)
    results = {"passed": all(c.passed for c in checks),
               "checks": [{"criterion": c.number, "title": c.title,
                           "passed": c.passed, "detail": c.detail} for c in checks]}
    return _record(cfg, results, {"tolerances": acceptance.TOL}), None


HANDLERS = {
    "wave": cmd_wave, "spectrum": cmd_spectrum, "scan": cmd_scan,
    "boundary": cmd_boundary, "bubble": cmd_bubble, "collisions": cmd_collisions,
    "dispersion": cmd_dispersion, "verify": cmd_verify,
}


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg):
    """Execute ``cfg`` and write its output; returns the exit code."""
    fmt = cfg["format"] or ("csv" if cfg.command in ("scan", "dispersion") else "json")
    try:
        record, table = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"kpb: config error: {exc}", file=sys.stderr)
        return 2
    except ScanError as exc:
        columns, rows = getattr(exc, "partial", (SCAN_COLUMNS, []))
        _emit(render_csv(columns, rows) + f"# FAILED: {exc}\n", cfg["out"])
        print(f"kpb: {exc}", file=sys.stderr)
        return 1
    except (ComputationError, KPBError) as exc:
        print(f"kpb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if fmt == "csv":
        if table is None:
            print(f"kpb: config error: format: csv not available for "
                  f"{cfg.command}", file=sys.stderr)
            return 2
        _emit(render_csv(*table), cfg["out"])
    else:
        _emit(render_json(record), cfg["out"])
    if cfg.command == "verify" and not record["results"]["passed"]:
        return 1
    return 0


def main(argv=None):
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"kpb: config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

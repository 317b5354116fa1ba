"""Command-line harness: JSON config in, report.json / samples.csv / summary.txt out.

Exit codes: 0 all tolerances met, 1 some tolerance missed, 2 invalid
configuration, 3 numerical failure inside a compute module.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time

import numpy as np
from mpmath import mp

from . import combinatorics, precision, profiles
from .curves import HyperbolicCurve, StraightLine
from .errors import ConfigError, HlabError
from .greens import GreensFamily
from .mellin import mellin, mellin_prime
from .pipelines import (Grids, extract_diagonal_powers, extract_diagonal_product, extract_diagonal_zfamily,
                        extract_offdiagonal, intexp_forward, msexp_check, scalar_curvature_d4)
from .transport import (ConstantPotential, GaussianPotential, SpacetimeModel, shift_coefficients, solve_transport,
                        transport_residual)

SCHEMA = 1

SUBCOMMANDS = ("verify-combinatorics", "msexp-check", "transport-check", "extract-diagonal",
               "extract-diagonal-powers", "extract-product", "extract-offdiagonal", "scal-d4",
               "intexp-forward")

DEFAULT_TOL = {
    "verify-combinatorics": 0.0,
    "msexp-check": 1e-6,
    "transport-check": 1e-7,
    "extract-diagonal": 1e-2,
    "extract-diagonal-powers": 1e-2,
    "extract-product": 2e-2,
    "extract-offdiagonal": 1e-2,
    "scal-d4": 5e-3,
    "intexp-forward": 1e-4,
}

# key -> accepted python types
CONFIG_KEYS = {
    "schema": (int,), "subcommand": (str,), "d": (int,), "mass": (int, float), "k_max": (int,),
    "offset": (int,), "curve": (str,), "test_function": (str,), "potential": (dict,),
    "grids": (dict,), "tolerance": (int, float), "out": (str,), "precision": (str,),
    "cases": (list,), "o_max": (int,), "d_min": (int,), "d_max": (int,), "z_grid": (list,),
    "points": (list,), "basepoint": (list,), "x": (list,), "y": (list,), "branch": (str,),
    "count": (int,), "alpha": (int, float, str), "terms": (int,), "check": (str,),
    "slots": (int,), "xi_stability": (int, float), "residual_tolerance": (int, float),
    "reference": (str,), "transport_residual": (bool,),
}
GRID_KEYS = {"s0", "s_ratio", "s_count", "z_radius", "z_count", "xi", "eps_ratio", "eps_count"}
POTENTIAL_KEYS = {"kind", "amplitude", "width", "center", "value"}
CASE_KEYS = {"d", "mass", "offset", "curve", "y", "x", "branch", "k_max"}


# -- configuration -----------------------------------------------------------------

def validate_config(cfg):
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, value in cfg.items():
        types = CONFIG_KEYS[key]
        if isinstance(value, bool) and bool not in types:
            raise ConfigError(f"{key} has the wrong type")
        if not isinstance(value, types):
            raise ConfigError(f"{key} must be of type {'/'.join(t.__name__ for t in types)}")
    if cfg.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"unsupported schema {cfg.get('schema')}; expected {SCHEMA}")
    if "subcommand" in cfg and cfg["subcommand"] not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {cfg['subcommand']!r}")
    if set(cfg.get("grids", {})) - GRID_KEYS:
        raise ConfigError(f"unknown grid keys: {sorted(set(cfg['grids']) - GRID_KEYS)}")
    if set(cfg.get("potential", {})) - POTENTIAL_KEYS:
        raise ConfigError(f"unknown potential keys: {sorted(set(cfg['potential']) - POTENTIAL_KEYS)}")
    for case in cfg.get("cases", []):
        if not isinstance(case, dict) or set(case) - CASE_KEYS:
            raise ConfigError(f"cases entries may only set {sorted(CASE_KEYS)}")
    if cfg.get("curve", "straight") not in ("straight", "hyperbolic"):
        raise ConfigError("curve must be 'straight' or 'hyperbolic'")
    if cfg.get("test_function", "odd_bump") != "odd_bump":
        raise ConfigError("only the odd bump test function is shipped")
    if cfg.get("precision", "extended") not in ("extended", "double"):
        raise ConfigError("precision must be 'extended' or 'double'")
    if "d" in cfg and cfg["d"] < 2:
        raise ConfigError("d must be at least 2")
    if "k_max" in cfg and not 0 <= cfg["k_max"] <= 6:
        raise ConfigError("k_max must be between 0 and 6")
    return cfg


def build_parser():
    parser = argparse.ArgumentParser(prog="hlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--d", type=int)
        p.add_argument("--mass", type=float)
        p.add_argument("--kmax", dest="k_max", type=int)
        p.add_argument("--offset", type=int)
        p.add_argument("--curve", choices=("straight", "hyperbolic"))
        p.add_argument("--tol", dest="tolerance", type=float)
        p.add_argument("--precision", choices=("extended", "double"))
        if name == "verify-combinatorics":
            p.add_argument("--omax", dest="o_max", type=int)
            p.add_argument("--dmin", dest="d_min", type=int)
            p.add_argument("--dmax", dest="d_max", type=int)
        if name == "transport-check":
            p.add_argument("--potential", choices=("gaussian", "constant"))
    return parser


def load_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        validate_config(cfg)
        if cfg.get("subcommand", args.subcommand) != args.subcommand:
            raise ConfigError(f"config is for {cfg['subcommand']!r}, not {args.subcommand!r}")
    for key, value in vars(args).items():
        if key in ("config", "subcommand", "potential") or value is None:
            continue
        cfg[key] = value
    if getattr(args, "potential", None):
        cfg["potential"] = dict(cfg.get("potential", {}), kind=args.potential)
    cfg.setdefault("schema", SCHEMA)
    cfg["subcommand"] = args.subcommand
    return validate_config(cfg)


def _grids(cfg):
    g = dict(cfg.get("grids", {}))
    if "xi" in g:
        g["xi"] = tuple(g["xi"])
    return Grids(**g)


def _curve(name, d):
    return HyperbolicCurve(d) if name == "hyperbolic" else StraightLine(d)


def _cases(cfg):
    base = {k: cfg[k] for k in CASE_KEYS if k in cfg}
    return [dict(base, **case) for case in cfg.get("cases", [{}])] or [base]


def _num(x):
    x = mp.mpmathify(x)
    return float(mp.re(x))


# -- subcommand bodies: each returns (cases, columns, rows, passed) ------------------

def run_verify_combinatorics(cfg, tol):
    k_max, o_max = cfg.get("k_max", 6), cfg.get("o_max", 4)
    d_min, d_max = cfg.get("d_min", 2), cfg.get("d_max", 8)
    certs = combinatorics.sweep_left_inverse(k_max, o_max, d_min, d_max)
    rows = [(c.d, c.o, c.k, l, str(r)) for c in certs for l, r in enumerate(c.residuals)]
    passed = all(c.holds for c in certs)
    case = {"checked": len(certs), "all_exact": passed,
            "certificates": [{"k": c.k, "o": c.o, "d": c.d, "residuals": [str(r) for r in c.residuals]}
                             for c in certs]}
    return [case], ("d", "o", "k", "l", "residual"), rows, passed


def _mellin_checks(tol):
    f = profiles.odd_bump()
    rows, worst_scale, worst_ibp = [], 0.0, 0.0
    finite = True
    for s in (0.5, 0.25):
        fs = profiles.rescale(f, s)
        for a in (-7.5, -5.25, -2.5, -0.5, 0.5, 1.5, 3.25, 6.0, 8.0):
            lhs = mellin(fs, a).value
            rhs = mp.mpf(s) ** a * mellin(f, a).value
            err = float(abs(lhs / rhs - 1))
            worst_scale = max(worst_scale, err)
            rows.append(("scaling", s, a, mp.nstr(lhs, 25), mp.nstr(rhs, 25), err))
    deriv = profiles.SmoothProfile(lambda t, order: _shift_jet(f, t, order), f.support_radius,
                                   f.max_order - 1, "f'")
    for a in (-6.5, -3.5, -1.5, -0.25, 0.75, 2.5, 5.5):
        lhs = mellin(f, a).value
        rhs = -mellin(deriv, a + 1).value / a
        err = float(abs(lhs / rhs - 1))
        worst_ibp = max(worst_ibp, err)
        rows.append(("ibp", 1, a, mp.nstr(lhs, 25), mp.nstr(rhs, 25), err))
    for n in range(-9, 10):
        v = mellin_prime(f, n)
        ok = mp.isfinite(v)
        finite = finite and bool(ok)
        rows.append(("mprime_integer", 1, n, mp.nstr(v, 25), "", 0.0 if ok else float("inf")))
    passed = worst_scale <= tol and worst_ibp <= tol and finite
    case = {"check": "mellin", "scaling_max_rel": worst_scale, "ibp_max_rel": worst_ibp,
            "mprime_finite_on_integers": finite, "tolerance": tol, "passed": passed}
    return case, rows, passed


def _shift_jet(h, t, order):
    """Jet of h' from the jet of h (one order higher)."""
    full = h.taylor(t, order + 1)
    j = np.arange(1, order + 2, dtype=full.dtype).reshape((-1,) + (1,) * t.ndim)
    return full[1:] * j


def run_msexp_check(cfg, tol):
    check = cfg.get("check", "msexp")
    if check not in ("mellin", "msexp", "both"):
        raise ConfigError("check must be 'mellin', 'msexp' or 'both'")
    cases, rows, passed = [], [], True
    if check in ("mellin", "both"):
        mtol = cfg.get("tolerance", 1e-10) if check == "mellin" else 1e-10
        case, mrows, ok = _mellin_checks(mtol)
        cases.append(case)
        rows += [("mellin",) + r for r in mrows]
        passed &= ok
    if check in ("msexp", "both"):
        rep = msexp_check(alpha=_alpha(cfg.get("alpha", 1)), terms=cfg.get("terms", 4), grids=_grids(cfg))
        ok = rep.max_error() <= tol
        cases.append(dict(rep.to_dict(), tolerance=tol, passed=ok))
        rows += [("msexp", "", "") + r + ("", "") for r in rep.samples]
        passed &= ok
    return cases, ("section", "kind", "scale", "argument", "lhs", "rhs", "rel_err"), rows, passed


def _alpha(a):
    from fractions import Fraction
    return Fraction(a) if not isinstance(a, float) else Fraction(a).limit_denominator(10 ** 6)


def _potential(params):
    params = dict(params or {"kind": "gaussian"})
    kind = params.pop("kind", "gaussian")
    if kind == "gaussian":
        return GaussianPotential(params.get("amplitude", 0.5), params.get("width", 1.0), params.get("center"))
    if kind == "constant":
        return ConstantPotential(params.get("value", 0.2))
    raise ConfigError(f"unknown potential kind {kind!r}")


def run_transport_check(cfg, tol):
    dims = [c["d"] for c in cfg.get("cases", [])] or [cfg.get("d", 2)]
    k_max = cfg.get("k_max", 3)
    zs = cfg.get("z_grid", [-0.3, 0.2, 0.45, 0.7])
    cases, rows, passed = [], [], True
    for d in dims:
        x = np.asarray(cfg.get("basepoint", [0.1, 0.2, -0.1, 0.05][:d]), dtype=float)[:d]
        pts = np.asarray(cfg.get("points", [[0.6, 0.3, 0.0, 0.1], [0.5, -0.2, 0.1, 0.0],
                                             [0.9, 0.1, 0.3, -0.2], [-0.4, 0.5, 0.2, 0.1]]), dtype=float)[:, :d]
        model = SpacetimeModel.flat(d, _potential(cfg.get("potential")))
        base = solve_transport(model, x, k_max, pts)
        worst = 0.0
        for z in zs:
            direct = solve_transport(model.shifted(z), x, k_max, pts)
            recomb = shift_coefficients(base, z)
            for k in range(k_max + 1):
                for i in range(len(pts)):
                    a, b = direct.values[k, i], recomb.values[k, i]
                    err = float(abs(a - b) / max(abs(b), 1e-300))
                    worst = max(worst, err)
                    rows.append((d, z, k, i, precision.repr_ld(a), precision.repr_ld(b), err))
        case = {"d": d, "k_max": k_max, "z_grid": zs, "shift_max_rel": worst}
        if cfg.get("transport_residual"):
            rtol = cfg.get("residual_tolerance", 1e-6)
            res = {k: transport_residual(model, x, k, pts[:2], samples=6) for k in range(1, k_max + 1)}
            case["transport_residual"] = res
            passed &= max(res.values()) <= rtol
        passed &= worst <= tol
        cases.append(case)
    return cases, ("d", "z", "k", "point", "solved", "recombined", "rel_err"), rows, passed


def _diag_common(cfg, tol, fn, **extra):
    cases, rows, passed = [], [], True
    grids = _grids(cfg)
    for idx, case in enumerate(_cases(cfg)):
        d = case.get("d", 4)
        fam = GreensFamily(d, case.get("mass", 0.0))
        w = _curve(case.get("curve", "straight"), d)
        rep = fn(fam, w, case, grids)
        errs = rep.relative_errors
        ok = max(errs.values()) <= tol
        info = dict(rep.to_dict(), tolerance=tol, passed=ok)
        for key, check in extra.items():
            ok_extra, detail = check(rep)
            info[key] = detail
            ok = ok and ok_extra
            info["passed"] = ok
        passed &= ok
        cases.append(info)
        rows += [(idx,) + r for r in rep.samples]
        columns = ("case",) + tuple(rep.sample_columns)
    return cases, columns, rows, passed


def run_extract_diagonal(cfg, tol, powers=False):
    fn = extract_diagonal_powers if powers else extract_diagonal_zfamily

    def one(fam, w, case, grids):
        return fn(fam, w, None, case.get("k_max", 2), case.get("offset", 0), grids,
                  cfg.get("reference", "closed_form"))

    return _diag_common(cfg, tol, one)


def run_extract_product(cfg, tol):
    stab = cfg.get("xi_stability", 1e-6)

    def one(fam, w, case, grids):
        return extract_diagonal_product(fam, w, None, case.get("k_max", 2), grids)

    def stability(rep):
        shifts = rep.diagnostics["xi_refinement_shift"]
        return max(shifts.values()) <= stab, {"shifts": shifts, "tolerance": stab}

    return _diag_common(cfg, tol, one, xi_stability=stability)


def run_extract_offdiagonal(cfg, tol):
    rtol = cfg.get("residual_tolerance", 1e-6)
    cases, rows, passed = [], [], True
    grids = _grids(cfg)
    for idx, case in enumerate(_cases(cfg)):
        d = case.get("d", 2)
        fam = GreensFamily(d, case.get("mass", 0.2))
        rep = extract_offdiagonal(fam, case.get("x"), case.get("y"), None, case.get("k_max", 2),
                                  cfg.get("count", 6), grids, case.get("branch"))
        res = rep.diagnostics["eps_fit"]["residual_norm"]
        ok = rep.max_error() <= tol and res <= rtol
        cases.append(dict(rep.to_dict(), tolerance=tol, residual_tolerance=rtol, passed=ok))
        rows += [(idx,) + r for r in rep.samples]
        passed &= ok
    return cases, ("case", "eps", "value"), rows, passed


def run_scal_d4(cfg, tol):
    d = cfg.get("d", 4)
    fam = GreensFamily(d, cfg.get("mass", 0.0))
    scal, rep = scalar_curvature_d4(fam, _curve(cfg.get("curve", "straight"), d), None, _grids(cfg))
    expected = 6 * fam.hadamard_coefficient(1)
    err = float(abs(scal - expected))
    ok = err <= tol
    case = {"scal": _num(scal), "expected": _num(expected), "abs_error": err, "tolerance": tol, "passed": ok,
            "diagonal_report": rep.to_dict()}
    return [case], ("s", "z_re", "z_im", "value_re", "value_im"), rep.samples, ok


def run_intexp_forward(cfg, tol):
    def one(fam, w, case, grids):
        return intexp_forward(fam, w, None, cfg.get("slots", 3), grids)

    return _diag_common(cfg, tol, one)


RUNNERS = {
    "verify-combinatorics": run_verify_combinatorics,
    "msexp-check": run_msexp_check,
    "transport-check": run_transport_check,
    "extract-diagonal": run_extract_diagonal,
    "extract-diagonal-powers": lambda cfg, tol: run_extract_diagonal(cfg, tol, powers=True),
    "extract-product": run_extract_product,
    "extract-offdiagonal": run_extract_offdiagonal,
    "scal-d4": run_scal_d4,
    "intexp-forward": run_intexp_forward,
}


# -- output ------------------------------------------------------------------------------

def _atomic_write(path, text):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _summary(report):
    lines = [f"hlab {report['subcommand']}: {report['status'].upper()}",
             f"tolerance: {report.get('tolerance')}", f"runtime: {report.get('runtime_s', 0):.2f} s"]
    if "error" in report:
        lines.append(f"error: {report['error']['type']}: {report['error']['message']}")
    for i, case in enumerate(report.get("cases", [])):
        if "relative_errors" in case:
            errs = ", ".join(f"k={k}: {v:.3g}" for k, v in case["relative_errors"].items())
            rec = ", ".join(f"k={k}: {v:.10g}" for k, v in case["recovered"].items()
                            if isinstance(v, float))
            lines.append(f"case {i} ({case['config'].get('d', '')}): recovered {rec}")
            lines.append(f"    errors {errs} -> {'pass' if case.get('passed') else 'FAIL'}")
        else:
            brief = {k: v for k, v in case.items() if not isinstance(v, (list, dict))}
            lines.append(f"case {i}: {brief}")
    return "\n".join(lines) + "\n"


def run(cfg):
    """Execute a validated config; returns (exit status, report dict)."""
    sub = cfg["subcommand"]
    out = cfg.get("out") or os.path.join("hlab_out", sub)
    tol = cfg.get("tolerance", DEFAULT_TOL[sub])
    precision.set_precision(cfg.get("precision") or os.environ.get("HLAB_PRECISION", "extended"))
    report = {"schema": SCHEMA, "subcommand": sub, "config": cfg, "tolerance": tol,
              "precision": precision.precision_mode()}
    columns, rows = (), []
    start = time.perf_counter()
    try:
        cases, columns, rows, passed = RUNNERS[sub](cfg, tol)
        report["cases"] = cases
        report["status"] = "pass" if passed else "fail"
        status = 0 if passed else 1
    except ConfigError:
        raise
    except HlabError as exc:
        report["status"] = "error"
        report["error"] = {"type": type(exc).__name__, "module": type(exc).__module__, "message": str(exc)}
        status = 3
    report["runtime_s"] = time.perf_counter() - start
    os.makedirs(out, exist_ok=True)
    _atomic_write(os.path.join(out, "report.json"), json.dumps(report, indent=2, default=_json_default) + "\n")
    _atomic_write(os.path.join(out, "samples.csv"), _csv_text(columns, rows))
    _atomic_write(os.path.join(out, "summary.txt"), _summary(report))
    return status, report


def _json_default(obj):
    if isinstance(obj, (mp.mpf, mp.mpc, np.generic)):
        return _num(obj)
    if isinstance(obj, (set, tuple)):
        return list(obj)
    return str(obj)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        status, report = run(cfg)
    except ConfigError as exc:
        print(f"hlab: configuration error: {exc}", file=sys.stderr)
        return 2
    out = cfg.get("out") or os.path.join("hlab_out", cfg["subcommand"])
    print(f"{cfg['subcommand']}: {report['status']} (report in {out})")
    return status


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``sfreg <subcommand> ...``; every run emits one JSON report."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .constants import ZETA
from .errors import SfregError
from .psvf import PSVF, classify_sigma_point, sliding_equilibria
from .regularize import NonlinearFamily, SlowFastSystem, blowup_linear, blowup_nonlinear
from .transition import TransitionConstraintSet, TransitionFunction, synthesize

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def to_jsonable(obj):
    """Rationals become strings, non-finite floats become null, containers recurse."""
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    return str(obj)


# -- input loading -------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _params(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} must look like name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_model(path, params):
    """A PSVF, a nonlinear family or a slow-fast system, by the keys present."""
    obj = _read_json(path)
    if "Ztilde" in obj:
        return NonlinearFamily.from_json(obj, params)
    if "X" in obj and "Y" in obj:
        return PSVF.from_json(obj, params)
    if "f" in obj and "g" in obj:
        return SlowFastSystem.from_json(obj, params)
    raise UsageError(f"{path}: expected keys X/Y, Ztilde or f/g")


def _load_phi(path, params):
    return TransitionFunction.from_json(_read_json(path), params)


def _slow_fast(model, phi):
    if isinstance(model, SlowFastSystem):
        return model
    if phi is None:
        raise UsageError("--phi is required to blow up a piecewise smooth field")
    if isinstance(model, NonlinearFamily):
        return blowup_nonlinear(model, phi)
    return blowup_linear(model, phi)


def _phi_opt(args):
    return _load_phi(args.phi, _params(args.param)) if args.phi else None


def _csv_path(args, name):
    if args.csv_dir is None:
        return None
    os.makedirs(args.csv_dir, exist_ok=True)
    return os.path.join(args.csv_dir, name)


def _eps_list(values):
    if values is None:
        return None
    out = [float(v) for v in values]
    if any(not e > 0 for e in out):
        raise UsageError("eps values must be positive")
    return out


def _window(values):
    xa, xb, ya, yb = values
    if not (xa < xb and ya < yb):
        raise UsageError("window ranges must be nonempty")
    return (xa, xb), (ya, yb)


# -- subcommands -----------------------------------------------------------------

def _phi_summary(tf: TransitionFunction) -> dict:
    return {"coefficients": tf.to_json()["coefficients"], "expr": str(tf.to_expr("t")),
            "degree": tf.degree, "monotonic": tf.is_monotonic(),
            "critical_points": [[t, v] for t, v in tf.critical_points()],
            "overshoot": tf.overshoot().to_json()}


def _phi_table(tf, n, path):
    from .simulate import write_csv
    if path is None:
        return None
    rows = tf.sample_table(n)
    write_csv(path, ("t", "phi", "dphi"), rows)
    return path


def cmd_phi_synth(args):
    c = TransitionConstraintSet.from_json(_read_json(args.constraints), _params(args.param))
    tf = synthesize(c)
    out = _phi_summary(tf)
    out["constraints"] = c.to_json()
    out["csv"] = _phi_table(tf, args.samples, _csv_path(args, "phi.csv"))
    return out


def cmd_phi_analyze(args):
    tf = _load_phi(args.phi, _params(args.param))
    out = _phi_summary(tf)
    if args.level is not None:
        out["inverse_roots"] = {"level": args.level, "roots": tf.inverse_roots(args.level)}
    out["csv"] = _phi_table(tf, args.samples, _csv_path(args, "phi.csv"))
    return out


def cmd_sigma_classify(args):
    model = _load_model(args.model, _params(args.param))
    psvf = model.psvf() if isinstance(model, NonlinearFamily) else model
    if not isinstance(psvf, PSVF):
        raise UsageError("sigma-classify needs a piecewise smooth field")
    ys = args.y if args.y else np.linspace(args.y_range[0], args.y_range[1], args.n).tolist()
    tol = args.zeta
    points = [classify_sigma_point(psvf, float(y), tol).to_json() for y in ys]
    return {"points": points, "sliding_equilibria": sliding_equilibria(psvf)}


def cmd_blowup(args):
    sfs = _slow_fast(_load_model(args.model, _params(args.param)), _phi_opt(args))
    out = {"f": str(sfs.f), "g": str(sfs.g), "chart": sfs.chart}
    try:
        fp, gp = sfs.polynomials()
        out["coefficients"] = {
            name: [{"x": m[0], "y": m[1], "eps": m[2], "c": c} for m, c in sorted(p.terms.items(), reverse=True)]
            for name, p in (("f", fp), ("g", gp))}
    except SfregError:
        out["coefficients"] = None
    return out


def cmd_critical_set(args):
    from .sfgeom import critical_set
    from .simulate import write_csv
    sfs = _slow_fast(_load_model(args.model, _params(args.param)), _phi_opt(args))
    cs = critical_set(sfs, _window(args.window), args.grid)
    path = _csv_path(args, "critical_set.csv")
    if path:
        write_csv(path, ("branch", "x", "y", "f_x", "tag"), cs.rows())
    out = cs.to_json()
    out["non_nh_points"] = cs.non_nh_points().tolist()
    out["csv"] = path
    return out


def cmd_sf_classify(args):
    from .sfgeom import classify_generic, predict_linear, predict_nonlinear
    model = _load_model(args.model, _params(args.param))
    phi = _phi_opt(args)
    point = tuple(args.point)
    usable = {"generic": True,
              "linear": isinstance(model, PSVF) and phi is not None,
              "nonlinear": isinstance(model, NonlinearFamily) and phi is not None}
    if args.method == "all":
        methods = [m for m, ok in usable.items() if ok]
    elif not usable[args.method]:
        raise UsageError(f"method {args.method} needs a matching --model and --phi")
    else:
        methods = [args.method]
    out = {}
    for m in methods:
        if m == "generic":
            rep = classify_generic(_slow_fast(model, phi), point, args.zeta)
        elif m == "linear":
            rep = predict_linear(model, phi, y0=point[1], x0=point[0], tol=args.zeta)
        else:
            rep = predict_nonlinear(model, phi, point, args.zeta)
        out[m] = rep.to_json()
    return {"verdict": out[methods[0]]["verdict"], "reports": out}


def cmd_simulate(args):
    from .simulate import Section, integrate, write_csv
    sfs = _slow_fast(_load_model(args.model, _params(args.param)), _phi_opt(args))
    section = Section(args.section[0], float(args.section[1])) if args.section else None
    chart = None if args.no_chart else "auto"
    t0 = time.perf_counter()
    tr = integrate(sfs, tuple(args.start), args.eps, args.t_end, args.rtol, args.atol,
                   section=section, chart=chart)
    out = tr.summary()
    out["wall_seconds"] = time.perf_counter() - t0
    path = _csv_path(args, "trajectory.csv")
    if path:
        write_csv(path, ("t", "x", "y"), tr.rows())
    out["csv"] = path
    if tr.reason == "step_failure":
        raise _DomainFailure(out, "integration stopped with step_failure")
    return out


class _DomainFailure(SfregError):
    def __init__(self, result, message):
        super().__init__(message)
        self.result = result


def cmd_fold_scaling(args):
    from .simulate import DEFAULT_EPS_LIST, contraction_estimate, fold_landing_fit, fold_sections, write_csv
    sfs = _slow_fast(_load_model(args.model, _params(args.param)), _phi_opt(args))
    eps = _eps_list(args.eps) or list(DEFAULT_EPS_LIST)
    fit = fold_landing_fit(sfs, tuple(args.point), args.rho, eps, args.rtol, args.atol)
    out = {"fit": fit.to_json()}
    path = _csv_path(args, "fold_scaling.csv")
    if path:
        write_csv(path, ("eps", "h", "y_exit", "reason"), fit.rows)
    if args.contraction:
        d_in, d_out, o = fold_sections(sfs, tuple(args.point), args.rho)
        ct = contraction_estimate(sfs, eps, d_in, d_out, time_sign=o["time_sign"])
        out["contraction"] = ct.to_json()
        cpath = _csv_path(args, "contraction.csv")
        if cpath:
            write_csv(cpath, ("eps", "width", "eps_log_width", "below_resolution", "failures"), ct.rows)
    out["csv"] = path
    return out


def cmd_theorem_a(args):
    from .sfgeom import theorem_a_report
    model = _load_model(args.model, _params(args.param))
    if not isinstance(model, PSVF):
        raise UsageError("theorem-a needs a piecewise smooth field (X/Y)")
    phi = _phi_opt(args)
    if phi is None:
        raise UsageError("theorem-a needs --phi")
    return theorem_a_report(model, phi, tuple(args.y_range), grid_n=args.grid)


def cmd_reproduce(args):
    from .registry import list_examples, verify
    if args.all == bool(args.id):
        raise UsageError("give exactly one of an example id or --all")
    ids = [e["id"] for e in list_examples()] if args.all else [args.id]
    reports = [verify(i).to_json() for i in ids]
    ok = all(r["pass"] for r in reports)
    out = {"examples": reports, "pass": ok}
    if len(reports) == 1:
        out["blowup_match"] = reports[0]["blowup_match"]
    else:
        matches = [r["blowup_match"] for r in reports if r["blowup_match"] is not None]
        out["blowup_match"] = all(matches)
    if not ok:
        bad = [r["id"] for r in reports if not r["pass"]]
        raise _DomainFailure(out, f"verification failed for {', '.join(bad)}")
    return out


def cmd_list_examples(args):
    from .registry import list_examples
    return {"examples": list_examples()}


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv-dir", help="directory for CSV tables")
    common.add_argument("--zeta", type=float, default=ZETA, help="zero tolerance for conditions")
    common.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="rational parameter value (repeatable)")

    p = argparse.ArgumentParser(prog="sfreg", description=__doc__)
    p.add_argument("--version", action="version", version=f"sfreg {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("phi-synth", parents=[common], help="synthesize φ from constraints")
    s.add_argument("--constraints", required=True)
    s.add_argument("--samples", type=_at_least(2), default=200)
    s.set_defaults(func=cmd_phi_synth)

    s = sub.add_parser("phi-analyze", parents=[common], help="critical points, overshoot, monotonicity")
    s.add_argument("--phi", required=True)
    s.add_argument("--samples", type=_at_least(2), default=200)
    s.add_argument("--level", type=float)
    s.set_defaults(func=cmd_phi_analyze)

    s = sub.add_parser("sigma-classify", parents=[common], help="classify points of Σ")
    s.add_argument("--model", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--y", type=float, nargs="+")
    g.add_argument("--y-range", type=float, nargs=2)
    s.add_argument("--n", type=_at_least(2), default=21)
    s.set_defaults(func=cmd_sigma_classify)

    s = sub.add_parser("blowup", parents=[common], help="regularize and blow up to slow-fast form")
    s.add_argument("--model", required=True)
    s.add_argument("--phi")
    s.set_defaults(func=cmd_blowup)

    s = sub.add_parser("critical-set", parents=[common], help="sample the critical set")
    s.add_argument("--model", required=True)
    s.add_argument("--phi")
    s.add_argument("--window", type=float, nargs=4, default=[-1.0, 1.0, -1.0, 1.0],
                   metavar=("XA", "XB", "YA", "YB"))
    s.add_argument("--grid", type=_at_least(2), default=101)
    s.set_defaults(func=cmd_critical_set)

    s = sub.add_parser("sf-classify", parents=[common], help="classify a point of the critical set")
    s.add_argument("--model", required=True)
    s.add_argument("--phi")
    s.add_argument("--point", type=float, nargs=2, required=True, metavar=("X", "Y"))
    s.add_argument("--method", choices=["generic", "linear", "nonlinear", "all"], default="generic")
    s.set_defaults(func=cmd_sf_classify)

    s = sub.add_parser("simulate", parents=[common], help="integrate the slow-fast system")
    s.add_argument("--model", required=True)
    s.add_argument("--phi")
    s.add_argument("--start", type=float, nargs=2, required=True, metavar=("X", "Y"))
    s.add_argument("--eps", type=_positive, required=True)
    s.add_argument("--t-end", type=_positive, default=1.0)
    s.add_argument("--rtol", type=_positive, default=1e-8)
    s.add_argument("--atol", type=_positive, default=1e-10)
    s.add_argument("--section", nargs=2, metavar=("ORIENTATION", "C"))
    s.add_argument("--no-chart", action="store_true", help="do not stop at the chart boundary")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("fold-scaling", parents=[common], help="fold landing exponent over ε")
    s.add_argument("--model", required=True)
    s.add_argument("--phi")
    s.add_argument("--point", type=float, nargs=2, required=True, metavar=("X", "Y"))
    s.add_argument("--rho", type=_positive, default=0.3)
    s.add_argument("--eps", type=float, nargs="+")
    s.add_argument("--rtol", type=_positive, default=1e-10)
    s.add_argument("--atol", type=_positive, default=1e-12)
    s.add_argument("--contraction", action="store_true", help="also tabulate image widths")
    s.set_defaults(func=cmd_fold_scaling)

    s = sub.add_parser("theorem-a", parents=[common], help="critical set versus sliding dynamics")
    s.add_argument("--model", required=True)
    s.add_argument("--phi")
    s.add_argument("--y-range", type=float, nargs=2, default=[-1.0, 1.0])
    s.add_argument("--grid", type=_at_least(2), default=101)
    s.set_defaults(func=cmd_theorem_a)

    s = sub.add_parser("reproduce", parents=[common], help="verify bundled examples")
    s.add_argument("id", nargs="?")
    s.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("list-examples", parents=[common], help="list bundled examples")
    s.set_defaults(func=cmd_list_examples)
    return p


def _at_least(n):
    def conv(text):
        v = int(text)
        if v < n:
            raise argparse.ArgumentTypeError(f"must be at least {n}")
        return v
    return conv


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    for k in ("model", "phi", "constraints"):
        if cfg.get(k):
            cfg[k + "_content"] = _read_json(cfg[k])
    cfg["threads"] = os.environ.get("SFREG_THREADS")
    return cfg


def _emit(report, out_path):
    text = json.dumps(to_jsonable(report), indent=2, ensure_ascii=False)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    from ._kernels import BACKEND
    report = {"tool": "sfreg", "version": __version__, "backend": BACKEND,
              "subcommand": args.subcommand, "ok": True, "error": None, "result": None}
    try:
        report["config"] = _config(args)
        report["result"] = args.func(args)
        code = EXIT_OK
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sfreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DomainFailure as exc:
        report.update(ok=False, result=exc.result,
                      error={"type": "VerificationFailed", "message": str(exc)})
        code = EXIT_DOMAIN
    except SfregError as exc:
        report.update(ok=False, error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_DOMAIN
    _emit(report, args.out)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""Command-line interface: tables, decompositions, zeros, verification and Monte Carlo.

Exit status: 0 on success, 1 on numerical failure or a failed verification,
2 on argument errors.
"""
import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import fraccalc, zeros
from ._backend import THREADS_ENV
from .errors import DomainError, FracOscError
from .ml_core import Kind
from .oscillations import OscParams, decompose_values, e_alpha_values, i_alpha_values
from .subordination import mc_oscillation

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- formatting

def _num(x):
    x = float(x)
    if not math.isfinite(x):
        raise FracOscError(f"refusing to emit non-finite value {x!r}")
    return format(x, ".17g")


def to_csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(c if isinstance(c, str) else _num(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise FracOscError(f"refusing to emit non-finite value {obj!r}")
    if isinstance(obj, dict):
        for v in obj.values():
            _finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _finite(v)
    return obj


def to_json(obj):
    return json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _records(header, rows):
    return [dict(zip(header, (c if isinstance(c, str) else float(c) for c in row))) for row in rows]


def _table_document(fmt, header, rows, meta):
    if fmt == "csv":
        return to_csv(header, rows)
    return to_json({**meta, "columns": list(header), "rows": _records(header, rows)})


def write_output(text, path):
    """Write once: stdout, or a temporary file renamed over ``path``."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fracosc-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- commands

def _grid(args, positive=False):
    if args.n_points < 2:
        raise UsageError("--n-points must be at least 2")
    t_min = args.t_min
    if t_min is None:
        t_min = args.t_max / args.n_points if positive else 0.0
    if not t_min < args.t_max:
        raise UsageError("--t-min must be below --t-max")
    if t_min < 0 or (positive and t_min <= 0):
        raise UsageError("--t-min must be positive" if positive else "--t-min must be nonnegative")
    return np.linspace(t_min, args.t_max, args.n_points)


def cmd_table(args):
    p = OscParams(args.alpha, args.omega)
    t = _grid(args)
    e, _ = e_alpha_values(p, t)
    i, _ = i_alpha_values(p, t)
    header = ("t", "e_alpha", "i_alpha")
    return _table_document(args.format, header, zip(t, e, i),
                           {"alpha": args.alpha, "omega": args.omega})


def cmd_decompose(args):
    if not 1.0 < args.alpha < 2.0:
        raise UsageError("decompose needs 1 < alpha < 2")
    t = _grid(args, positive=True)
    rows = []
    for kind in (Kind.E, Kind.I):
        total, cut, res, _ = decompose_values(kind, args.alpha, t)
        rows += [(kind.value, *r) for r in zip(t, total, cut, res)]
    header = ("kind", "t", "total", "branch_cut", "residue")
    return _table_document(args.format, header, rows, {"alpha": args.alpha})


def _zero_report_dict(r):
    c = r.certificate
    return {
        "kind": r.kind.value,
        "alpha": r.alpha,
        "count": r.count,
        "zeros": list(r.zeros),
        "trivial_zero": r.trivial_zero,
        "scan_points": r.scan_points,
        "scan_step": r.scan_step,
        "refine_tol": r.refine_tol,
        "t_max": r.t_max,
        "certificate": {
            "dominance_t": c.t_max,
            "cut_lower_bound": list(c.cut),
            "residue_envelope": list(c.envelope),
            "secant_slope": c.secant_slope,
            "envelope_rate": c.envelope_rate,
            "holds": c.holds,
        },
    }


def cmd_zeros(args):
    kinds = (Kind.E, Kind.I) if args.kind == "both" else (Kind(args.kind),)
    reports = [zeros.find_zeros(k, args.alpha, args.refine_tol) for k in kinds]
    if args.format == "csv":
        rows = [(r.kind.value, str(j), z) for r in reports for j, z in enumerate(r.zeros, 1)]
        return to_csv(("kind", "index", "t"), rows)
    return to_json({"alpha": args.alpha, "reports": [_zero_report_dict(r) for r in reports]})


def verify_report(alpha, n, horizon, omega, band):
    results = fraccalc.convergence_study(alpha, horizon, n, omega, band)
    checks = []
    for r in results:
        checks.append({
            "name": r.name,
            "sup_norm": r.coarse.sup_norm,
            "sup_norm_refined": r.fine.sup_norm,
            "sup_norm_full_grid": r.coarse.sup_norm_full,
            "window_start": r.coarse.window_start,
            "measured_order": r.measured_order,
            "expected_order": r.expected_order,
            "passed": r.passed,
        })
    t = np.linspace(0.0, 5.0 ** (1.0 / alpha), 41)
    d_ei, d_ie = fraccalc.jseries_check(alpha, t)
    series = {"J_e=i": d_ei, "J_i=1-e": d_ie, "tolerance": 1e-10,
              "passed": max(d_ei, d_ie) <= 1e-10}
    ok = all(c["passed"] for c in checks) and series["passed"]
    doc = {"alpha": alpha, "n": n, "horizon": horizon, "omega": omega, "order_band": band,
           "checks": checks, "termwise_series": series, "passed": ok}
    return doc, ok


def cmd_verify(args):
    if not 1.0 <= args.alpha <= 2.0:
        raise UsageError("verify needs 1 <= alpha <= 2")
    if args.n < 64:
        raise UsageError("--n must be at least 64")
    doc, ok = verify_report(args.alpha, args.n, args.horizon, args.omega, args.band)
    return to_json(doc), ok


def cmd_mc(args):
    p = OscParams(args.alpha, args.omega)
    t = _grid(args)
    est = mc_oscillation(p, t, args.n_paths, args.seed, n_threads=args.threads)
    rows = zip(est.t_grid, est.a_hat, est.b_hat, est.std_err[:, 0], est.std_err[:, 1])
    header = ("t", "a_hat", "b_hat", "std_err_a", "std_err_b")
    meta = {"alpha": args.alpha, "omega": args.omega, "n_paths": est.n_paths,
            "seed": est.seed, "tau_step": est.tau_step}
    return _table_document(args.format, header, rows, meta)


# ---------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracosc",
        description="Fractional oscillations e_alpha(t), i_alpha(t): tables, decomposition, "
                    "zeros, verification and Monte-Carlo subordination.",
        epilog=f"Environment: {THREADS_ENV} sets the default thread count of the "
               "Monte-Carlo kernel (results do not depend on it).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, fmt="csv", grid=True, t_max=10.0, n_points=200):
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--output", default=None, help="output file (default: standard output)")
        if grid:
            sp.add_argument("--t-min", type=float, default=None)
            sp.add_argument("--t-max", type=float, default=t_max)
            sp.add_argument("--n-points", type=int, default=n_points)

    sp = sub.add_parser("table", help="e_alpha and i_alpha on a uniform grid")
    common(sp)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("decompose", help="branch-cut and residue parts of both functions")
    common(sp, t_max=25.0)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("zeros", help="positive zeros with the finiteness certificate")
    common(sp, fmt="json", grid=False)
    sp.add_argument("--kind", choices=("e", "i", "both"), default="both")
    sp.add_argument("--refine-tol", type=float, default=zeros.DEFAULT_REFINE_TOL)
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("verify", help="residuals of the fractional equations and their orders")
    sp.add_argument("--alpha", type=float, default=1.5)
    sp.add_argument("--n", type=int, default=1024)
    sp.add_argument("--horizon", type=float, default=10.0)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--band", type=float, default=0.3, help="allowed |measured - expected| order")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_verify, format="json")

    sp = sub.add_parser("mc", help="Monte-Carlo subordination estimates with standard errors")
    common(sp, n_points=11)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--n-paths", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_mc)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"fracosc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FracOscError as exc:
        print(f"fracosc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text, ok = result if isinstance(result, tuple) else (result, True)
    write_output(text, args.output)
    return EXIT_OK if ok else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .abel import AbelParams, TruncationPolicy, log_weights, normalization_defect, truncation_index
from .bounds import compare_schemes, derivative_norms, estimate_constant, modulus_bound, smooth_bound
from .errors import BatchEvaluationError, JainError, NumericError
from .experiment import (
    emit_report,
    load_spec,
    parse_n_list,
    parse_x_grid,
    resolve_function,
    run_experiment,
    spec_from_config,
)
from .functions import builtin_names
from .moments import central_moment_closed, central_moment_series, moment_report
from .operators import OperatorConfig
from .sequences import parse_beta_rule, parse_scheme
from .verify import verify_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _add_function_args(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--function", help=f"built-in function: {', '.join(builtin_names())}")
    g.add_argument("--expr", help="expression in x, e.g. 'exp(-x) * sin(3*x)'")


def _add_scheme_args(p, x_default="1"):
    p.add_argument("--scheme", default=None, help="identity | power-shift:<r> | table:<csv> (default identity)")
    p.add_argument("--beta", default=None, help="const:<v> | inv-n | table:<csv> (default const:0)")
    p.add_argument("--n", default=None, help="comma-separated ascending n values (default 10)")
    p.add_argument("--x", default=None, help=f"comma list or linspace:<a>:<b>:<count> (default {x_default})")
    p.add_argument("--p", type=int, default=None, help="weight index (default: the function's class)")


def _add_output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=None, help="worker count (0 = auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jain-approx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="tabulate generalized Poisson weights")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--count", type=int, default=10, help="number of leading weights to print")
    p.add_argument("--rel-tol", type=float, default=1e-14)

    p = sub.add_parser("moment", help="raw and central moments, closed form against series")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--a", type=float, default=10.0, help="a_n")
    p.add_argument("--b", type=float, default=10.0, help="b_n")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--x", type=float, default=1.0)

    for name, text in (("approx", "evaluate J_n over an (n, x) grid"),
                       ("kantorovich", "evaluate the Kantorovich variant K_n over an (n, x) grid")):
        p = sub.add_parser(name, help=text)
        _add_function_args(p)
        _add_scheme_args(p)
        _add_output_args(p)

    p = sub.add_parser("bounds", help="measured error against the bound expressions")
    _add_function_args(p)
    _add_scheme_args(p)

    p = sub.add_parser("compare", help="power-shift scheme against a_n = b_n = n")
    _add_function_args(p)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--n", default="5,10,20")
    p.add_argument("--x", default="1")

    p = sub.add_parser("experiment", help="run an experiment from a JSON config")
    p.add_argument("--config", help="JSON document mirroring the experiment fields")
    _add_function_args(p, required=False)
    _add_scheme_args(p)
    _add_output_args(p)
    p.add_argument("--kind", choices=("J", "K"), default=None)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def _overrides(args, **extra) -> dict:
    out = {
        "function": getattr(args, "function", None),
        "expr": getattr(args, "expr", None),
        "scheme": getattr(args, "scheme", None),
        "beta": getattr(args, "beta", None),
        "n": getattr(args, "n", None),
        "x": getattr(args, "x", None),
        "p": getattr(args, "p", None),
        "format": getattr(args, "format", None),
        "output": getattr(args, "output", None),
        "threads": getattr(args, "threads", None),
    }
    out.update(extra)
    return out


def _run_report(spec) -> int:
    result = run_experiment(spec)
    if result.diagnostics is not None:
        for line in result.diagnostics.summary_lines():
            print(f"# {line}", file=sys.stderr)
    text = emit_report(result.rows, spec.format, spec.output)
    if spec.output is None:
        sys.stdout.write(text)
    failed = [r for r in result.rows if r.status != "ok"]
    for r in failed:
        print(f"cell n={r.n} x={r.x!r} failed: {r.status}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_weights(args) -> int:
    params = AbelParams(args.alpha, args.beta)
    pol = TruncationPolicy(rel_tol=args.rel_tol)
    k = np.arange(args.count)
    for kk, lw in zip(k, log_weights(k, params.alpha, params.beta)):
        print(f"{kk}\t{math.exp(lw):.17g}")
    print(f"# terms {truncation_index(params, pol=pol)}  |1 - sum| {normalization_defect(params, pol):.3e}")
    return EXIT_OK


def cmd_moment(args) -> int:
    cfg = OperatorConfig(1, args.a, args.b, args.beta)
    print("order\tseries\tclosed\tstirling\tgap")

    def fmt(v):
        return "-" if v is None else f"{v:.17g}"

    for r in range(args.order + 1):
        rep = moment_report(r, cfg, args.x)
        print(f"{r}\t{fmt(rep.series_value)}\t{fmt(rep.closed_value)}\t{fmt(rep.stirling_value)}\t{fmt(rep.abs_gap)}")
    print("central\tseries\tclosed")
    for m in range(1, min(args.order, 4) + 1):
        print(f"{m}\t{central_moment_series(m, cfg, args.x):.17g}\t{central_moment_closed(m, cfg, args.x):.17g}")
    return EXIT_OK


def cmd_approx(args, kind="J") -> int:
    return _run_report(spec_from_config({}, **_overrides(args, kind=kind)))


def _scheme_from(args):
    beta = parse_beta_rule(args.beta or "const:0")
    return parse_scheme(args.scheme or "identity", beta)


def cmd_bounds(args) -> int:
    f = resolve_function(args.function, args.expr)
    scheme = _scheme_from(args)
    p = f.p_class if args.p is None else args.p
    spec = spec_from_config({}, **_overrides(args, p=p))
    rows = run_experiment(spec).rows
    norms = derivative_norms(f, p) if f.has_derivatives else None
    moduli = f.omega1 is not None and f.omega2 is not None
    print("n\tx\tmeasured\txi\tdrift_term\tsmooth_term\tmodulus_bound")
    measured, breakdowns = [], []
    for row in rows:
        cfg = OperatorConfig.from_scheme(scheme, row.n)
        smooth = drift = math.nan
        if norms is not None:
            bd = smooth_bound(norms, cfg, row.x)
            drift, smooth = bd.drift_term, bd.smooth_term
            measured.append(row.weighted_error)
            breakdowns.append(bd)
        mb = modulus_bound(f, p, cfg, row.x) if moduli and row.xi > 0 else math.nan
        print(f"{row.n}\t{row.x:g}\t{row.weighted_error:.6e}\t{row.xi:.6e}\t{drift:.6e}\t{smooth:.6e}\t{mb:.6e}")
    if breakdowns:
        print(f"# smallest constant C with measured <= drift + C * smooth: {estimate_constant(measured, breakdowns):.6g}")
    else:
        print("# no analytic derivatives: smooth-function bound skipped")
    return EXIT_OK


def cmd_compare(args) -> int:
    f = resolve_function(args.function, args.expr)
    print("n\tx\tmodified_error\toriginal_error\twinner")
    for row in compare_schemes(f, parse_n_list(args.n), args.r, parse_x_grid(args.x)):
        print(f"{row.n}\t{row.x:g}\t{row.modified_error:.17g}\t{row.original_error:.17g}\t{row.winner}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    overrides = _overrides(args, kind=args.kind)
    spec = load_spec(args.config, **overrides) if args.config else spec_from_config({}, **overrides)
    return _run_report(spec)


def cmd_verify(args) -> int:
    result = verify_suite(args.level)
    print("\n".join(result.lines()))
    return EXIT_OK if result.passed else EXIT_VERIFY


COMMANDS = {
    "weights": cmd_weights,
    "moment": cmd_moment,
    "approx": cmd_approx,
    "kantorovich": lambda a: cmd_approx(a, "K"),
    "bounds": cmd_bounds,
    "compare": cmd_compare,
    "experiment": cmd_experiment,
    "verify": cmd_verify,
}


def _is_numeric(exc) -> bool:
    if isinstance(exc, BatchEvaluationError):
        return all(isinstance(e, NumericError) for _, _, e in exc.failures)
    return isinstance(exc, NumericError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except JainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if _is_numeric(exc) else EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Experiment runner: evaluate an operator over an (n, x) grid and write
one report row per cell."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .abel import DEFAULT_POLICY, TruncationPolicy
from .bounds import derivative_norms, smooth_bound
from .errors import JainError
from .functions import TestFunction, builtin, from_expr
from .moments import xi
from .operators import OperatorConfig, QuadratureSpec, evaluate_J, evaluate_K, thread_count
from .quadrature import eval_vectorized
from .sequences import SchemeDiagnostics, SequenceScheme, parse_beta_rule, parse_scheme, validate_scheme
from .spaces import GridSpec, omega_p

HEADER = (
    "n", "x", "a_n", "b_n", "beta_n", "op_value", "f_value",
    "weighted_error", "xi", "drift_term", "bound_total", "status",
)


@dataclass(frozen=True)
class ReportRow:
    n: int
    x: float
    a_n: float
    b_n: float
    beta_n: float
    op_value: float
    f_value: float
    weighted_error: float
    xi: float
    drift_term: float
    bound_total: float
    status: str = "ok"


@dataclass
class ExperimentSpec:
    function: TestFunction
    scheme: SequenceScheme = field(default_factory=SequenceScheme)
    n_list: list = field(default_factory=lambda: [10])
    x_grid: list = field(default_factory=lambda: [1.0])
    p: int = 0
    kind: str = "J"
    output: str | None = None
    format: str = "csv"
    truncation: TruncationPolicy = DEFAULT_POLICY
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    norm_grid: GridSpec = field(default_factory=GridSpec)
    workers: int | None = None

    def __post_init__(self):
        self.n_list = [int(n) for n in self.n_list]
        self.x_grid = [float(x) for x in self.x_grid]
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ValueError("n_list must be nonempty with positive entries")
        if self.n_list != sorted(self.n_list):
            raise ValueError("n_list must be ascending")
        if not self.x_grid or any(not 0 <= x <= self.norm_grid.x_max for x in self.x_grid):
            raise ValueError(f"x_grid must be nonempty and inside [0, {self.norm_grid.x_max}]")
        if self.kind not in ("J", "K"):
            raise ValueError("kind must be 'J' or 'K'")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        if self.p < 0:
            raise ValueError("p must be nonnegative")


@dataclass
class ExperimentResult:
    rows: list
    diagnostics: SchemeDiagnostics | None


def parse_x_grid(text: str) -> list[float]:
    """``0.5,1,2`` or ``linspace:<start>:<stop>:<count>``."""
    if text.startswith("linspace:"):
        start, stop, count = text.split(":")[1:]
        return np.linspace(float(start), float(stop), int(count)).tolist()
    return [float(v) for v in text.split(",") if v.strip()]


def parse_n_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def resolve_function(name: str | None = None, expr: str | None = None) -> TestFunction:
    if (name is None) == (expr is None):
        raise ValueError("give exactly one of a built-in function name or an expression")
    return builtin(name) if name is not None else from_expr(expr)


def spec_from_config(config: dict, **overrides) -> ExperimentSpec:
    """Build a spec from a JSON-style dict; non-None overrides win."""
    merged = dict(config)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "expr" in overrides and overrides["expr"] is not None:
        merged.pop("function", None)
    if "function" in overrides and overrides["function"] is not None:
        merged.pop("expr", None)

    fn = resolve_function(merged.get("function"), merged.get("expr"))
    beta = parse_beta_rule(str(merged.get("beta", "const:0")))
    scheme = parse_scheme(str(merged.get("scheme", "identity")), beta)
    n_list = merged.get("n", [10])
    if isinstance(n_list, str):
        n_list = parse_n_list(n_list)
    x_grid = merged.get("x", [1.0])
    if isinstance(x_grid, str):
        x_grid = parse_x_grid(x_grid)
    trunc = TruncationPolicy(
        rel_tol=float(merged.get("rel_tol", DEFAULT_POLICY.rel_tol)),
        streak=int(merged.get("streak", DEFAULT_POLICY.streak)),
        k_max=int(merged.get("k_max", DEFAULT_POLICY.k_max)),
    )
    quad = QuadratureSpec(abs_tol=float(merged.get("abs_tol", 1e-12)),
                          max_depth=int(merged.get("max_depth", 50)))
    grid = GridSpec(x_max=float(merged.get("x_max", 20.0)),
                    x_count=int(merged.get("x_count", 2001)))
    return ExperimentSpec(
        function=fn, scheme=scheme, n_list=n_list, x_grid=x_grid,
        p=int(merged.get("p", fn.p_class)), kind=str(merged.get("kind", "J")),
        output=merged.get("output"), format=str(merged.get("format", "csv")),
        truncation=trunc, quadrature=quad, norm_grid=grid,
        workers=merged.get("threads"),
    )


def load_spec(path, **overrides) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_config(json.load(fh), **overrides)


def _cell(spec: ExperimentSpec, norms, cfg: OperatorConfig, x: float) -> ReportRow:
    f = spec.function
    op = evaluate_J if spec.kind == "J" else evaluate_K
    z = xi(cfg, x)
    # The smooth-function bound is stated for J only.
    if norms is not None and spec.kind == "J":
        bd = smooth_bound(norms, cfg, x)
        drift, total = bd.drift_term, bd.total
    else:
        drift = total = math.nan
    value = fx = math.nan
    try:
        fx = float(eval_vectorized(f, np.array([x]))[0])
        value = op(f, cfg, x, max(spec.p, f.p_class))
        status = "ok"
    except JainError as exc:
        status = type(exc).__name__
    err = omega_p(spec.p, x) * abs(value - fx)
    return ReportRow(cfg.n, x, cfg.a_n, cfg.b_n, cfg.beta, value, fx, err, z, drift, total, status)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """One row per (n, x), ordered by n then x; per-cell numeric failures
    are recorded in the status column and the run continues."""
    f = spec.function
    norms = derivative_norms(f, spec.p, spec.norm_grid) if f.has_derivatives else None
    cfgs = [OperatorConfig.from_scheme(spec.scheme, n, truncation=spec.truncation,
                                       quadrature=spec.quadrature) for n in spec.n_list]
    cells = [(cfg, x) for cfg in cfgs for x in spec.x_grid]
    nthreads = thread_count(spec.workers)
    if nthreads == 1:
        rows = [_cell(spec, norms, c, x) for c, x in cells]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            rows = list(pool.map(lambda cx: _cell(spec, norms, *cx), cells))
    diag = validate_scheme(spec.scheme, max(4, spec.n_list[-1])) if spec.scheme.kind != "table" else None
    return ExperimentResult(rows, diag)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.17g" % v


def report_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow([_fmt(getattr(row, name)) for name in HEADER])
    return buf.getvalue()


def report_json(rows) -> str:
    def clean(d):
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}
    return json.dumps([clean(asdict(r)) for r in rows], indent=1) + "\n"


def emit_report(rows, format: str = "csv", path=None) -> str:
    """Serialise rows; write them to ``path`` (UTF-8, LF) when given."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to emit")
    text = report_csv(rows) if format == "csv" else report_json(rows)
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    if path is not None:
        Path(path).write_bytes(text.encode("utf-8"))
    return text


def read_report(path) -> list[ReportRow]:
    """Inverse of :func:`emit_report` for either format (chosen by suffix)."""
    text = Path(path).read_text(encoding="utf-8")
    types = {f.name: f.type for f in fields(ReportRow)}
    if str(path).endswith(".json"):
        records = [{k: (math.nan if v is None else v) for k, v in r.items()} for r in json.loads(text)]
    else:
        records = list(csv.DictReader(io.StringIO(text)))
    out = []
    for rec in records:
        kw = {}
        for name in HEADER:
            v = rec[name]
            kw[name] = int(v) if types[name] == "int" else (v if types[name] == "str" else float(v))
        out.append(ReportRow(**kw))
    return out


__all__ = [
    "HEADER", "ReportRow", "ExperimentSpec", "ExperimentResult", "run_experiment",
    "emit_report", "read_report", "load_spec", "spec_from_config", "parse_x_grid",
    "parse_n_list", "resolve_function",
]

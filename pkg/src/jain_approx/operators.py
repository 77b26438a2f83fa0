"""The modified Jain operator J_n(f; a_n, b_n; x) and its Kantorovich form.

    J_n(f; x) = sum_k w(k; a_n x, beta) f(k / b_n)
    K_n(f; x) = b_n sum_k w(k; a_n x, beta) * integral of f over [k/b_n, (k+1)/b_n]

Both sums are truncated by the rule in :mod:`jain_approx.abel` using the
growth class of ``f`` to control the tail.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .abel import DEFAULT_POLICY, AbelParams, TruncationPolicy, polynomial_growth, series_sum, weights_until
from .errors import BatchEvaluationError, JainError
from .quadrature import adaptive_simpson, eval_vectorized, simpson_cells
from .sequences import SequenceScheme, scheme_values

THREADS_ENV = "JAIN_APPROX_THREADS"


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    max_depth: int = 50

    def __post_init__(self):
        if not self.abs_tol > 0 or self.max_depth < 1:
            raise ValueError("abs_tol must be positive and max_depth at least 1")


@dataclass(frozen=True)
class OperatorConfig:
    n: int
    a_n: float
    b_n: float
    beta: float = 0.0
    truncation: TruncationPolicy = DEFAULT_POLICY
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not (self.a_n >= 1 and self.b_n >= 1):
            raise ValueError(f"need a_n >= 1 and b_n >= 1, got {self.a_n!r}, {self.b_n!r}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta!r}")

    @classmethod
    def from_scheme(cls, scheme: SequenceScheme, n: int, **kw) -> "OperatorConfig":
        a, b, beta = scheme_values(scheme, n)
        return cls(n, a, b, beta, **kw)

    @classmethod
    def classical(cls, n: int, beta: float = 0.0, **kw) -> "OperatorConfig":
        """a_n = b_n = n: the unmodified Jain operator."""
        return cls(n, float(n), float(n), beta, **kw)

    @property
    def drift(self) -> float:
        """a_n / (b_n (1 - beta)), the slope of J(t; x) in x."""
        return self.a_n / (self.b_n * (1.0 - self.beta))


def _growth_of(f, growth_p):
    if growth_p is not None:
        return int(growth_p)
    return int(getattr(f, "p_class", 0))


def _weights(cfg: OperatorConfig, x: float, growth_p: int) -> np.ndarray:
    p = AbelParams(cfg.a_n * x, cfg.beta)
    return weights_until(p, polynomial_growth(growth_p, cfg.b_n), cfg.truncation)


def _check_x(x):
    x = float(x)
    if not (x >= 0 and math.isfinite(x)):
        raise ValueError(f"x must be a finite nonnegative number, got {x!r}")
    return x


def evaluate_J(f, cfg: OperatorConfig, x: float, growth_p: int | None = None) -> float:
    """J_n(f; a_n, b_n; x).  ``growth_p`` defaults to ``f.p_class`` if present."""
    x = _check_x(x)
    if x == 0.0:
        return float(eval_vectorized(f, np.zeros(1))[0])
    w = _weights(cfg, x, _growth_of(f, growth_p))
    values = eval_vectorized(f, np.arange(w.size) / cfg.b_n)
    return series_sum(w * values)


def evaluate_K(f, cfg: OperatorConfig, x: float, growth_p: int | None = None) -> float:
    """Kantorovich form: cell means of f replace the point samples."""
    x = _check_x(x)
    q = cfg.quadrature
    if x == 0.0:
        return cfg.b_n * adaptive_simpson(f, 0.0, 1.0 / cfg.b_n, q.abs_tol, q.max_depth)
    w = _weights(cfg, x, _growth_of(f, growth_p))
    k = np.arange(w.size)
    cells = simpson_cells(f, k / cfg.b_n, (k + 1) / cfg.b_n, q.abs_tol, q.max_depth)
    return cfg.b_n * series_sum(w * cells)


def evaluate_jain(f, n: int, beta: float, x: float, growth_p: int | None = None) -> float:
    """Unmodified Jain operator: the series with a_n = b_n = n."""
    return evaluate_J(f, OperatorConfig.classical(n, beta), x, growth_p)


def thread_count(workers: int | None = None) -> int:
    """Worker count from the argument or JAIN_APPROX_THREADS (0 = auto)."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        workers = int(raw)
    if workers < 0:
        raise ValueError("worker count must be nonnegative")
    return workers or (os.cpu_count() or 1)


def batch_evaluate(
    f,
    scheme: SequenceScheme,
    n_list,
    x_grid,
    growth_p: int | None = None,
    kind: str = "J",
    workers: int | None = None,
    truncation: TruncationPolicy = DEFAULT_POLICY,
    quadrature: QuadratureSpec | None = None,
) -> np.ndarray:
    """Matrix of operator values, rows indexed by n and columns by x.

    Cells are independent and are written back by index, so the result does
    not depend on the worker count or on completion order.
    """
    if kind not in ("J", "K"):
        raise ValueError("kind must be 'J' or 'K'")
    op = evaluate_J if kind == "J" else evaluate_K
    quadrature = quadrature or QuadratureSpec()
    cfgs = [OperatorConfig.from_scheme(scheme, n, truncation=truncation, quadrature=quadrature)
            for n in n_list]
    xs = [float(x) for x in x_grid]
    cells = [(i, j) for i in range(len(cfgs)) for j in range(len(xs))]

    def run(cell):
        i, j = cell
        try:
            return op(f, cfgs[i], xs[j], growth_p), None
        except JainError as exc:
            return math.nan, exc

    nthreads = thread_count(workers)
    if nthreads == 1:
        results = [run(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(run, cells))

    out = np.empty((len(cfgs), len(xs)))
    failures = []
    for (i, j), (value, exc) in zip(cells, results):
        out[i, j] = value
        if exc is not None:
            failures.append((cfgs[i].n, xs[j], exc))
    if failures:
        raise BatchEvaluationError(failures)
    return out

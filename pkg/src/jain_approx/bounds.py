"""Error-bound expressions for J_n and their comparison with measured errors.

The constants in the quantitative estimates are only known to exist, so
the bound routines take the constant as an argument and
:func:`estimate_constant` fits the smallest one consistent with a dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateXi, EmptyDataset
from .moments import extract_lambda, xi
from .operators import OperatorConfig, evaluate_J
from .quadrature import eval_vectorized
from .sequences import SequenceScheme, scheme_values
from .spaces import DEFAULT_GRID, GridSpec, omega_p, weighted_norm


@dataclass(frozen=True)
class BoundBreakdown:
    drift_term: float
    smooth_term: float
    constant_used: float

    @property
    def total(self) -> float:
        return self.drift_term + self.constant_used * self.smooth_term


def m1_constant(b_1: float, p: int, beta: float, lambda_table=None) -> float:
    """Upper bound for ||J_n(1/omega_p)||_p valid whenever a_n <= b_n and b_n >= b_1.

    With lambda_{p,j} in the convention of :func:`extract_lambda`,

        M1 = 1 + (1-beta)^-p  sum_j lambda_{p,j} (1-beta)^-(p-j) b_1^-(p-j).
    """
    if p == 0:
        return 1.0
    lam = lambda_table if lambda_table is not None else extract_lambda(p, beta)
    q = 1.0 - beta
    total = math.fsum(lam[j - 1] * q ** -(p - j) * b_1 ** -(p - j) for j in range(1, p + 1))
    return 1.0 + q**-p * total


def _inverse_weight(p):
    if p == 0:
        return lambda t: np.ones(np.shape(t))
    return lambda t: 1.0 + t**p


def check_m1_bound(p: int, scheme: SequenceScheme, n_list, grid=DEFAULT_GRID) -> float:
    """Largest ratio omega_p(x) J(1/omega_p; x) / M1 over n in n_list and the grid."""
    x = grid.points() if isinstance(grid, GridSpec) else np.asarray(grid, dtype=float)
    b_1 = scheme_values(scheme, 1)[1]
    g = _inverse_weight(p)
    worst = 0.0
    lam_cache = {}
    for n in n_list:
        cfg = OperatorConfig.from_scheme(scheme, n)
        if cfg.beta not in lam_cache:
            lam_cache[cfg.beta] = m1_constant(b_1, p, cfg.beta)
        m1 = lam_cache[cfg.beta]
        vals = np.array([evaluate_J(g, cfg, xi_, growth_p=p) for xi_ in x])
        worst = max(worst, float(np.max(omega_p(p, x) * vals)) / m1)
    return worst


def smooth_bound(f_norms, cfg: OperatorConfig, x: float, constant: float = 1.0) -> BoundBreakdown:
    """Right side of the C^2 estimate: ||f'|| |drift - 1| x + C ||f''|| xi(x)."""
    d1_norm, d2_norm = f_norms
    return BoundBreakdown(
        drift_term=d1_norm * abs(cfg.drift - 1.0) * x,
        smooth_term=d2_norm * xi(cfg, x),
        constant_used=constant,
    )


def _moduli(f, moduli):
    if moduli is None:
        moduli = (getattr(f, "omega1", None), getattr(f, "omega2", None))
    w1, w2 = moduli
    if w1 is None or w2 is None:
        raise ValueError("analytic moduli are required for this bound")
    return w1, w2


def modulus_bound(f, p: int, cfg: OperatorConfig, x: float, moduli=None, constant: float = 1.0) -> float:
    """|drift - 1| x xi^-1/2 w1(sqrt xi) + C w2(sqrt xi), for x > 0."""
    w1, w2 = _moduli(f, moduli)
    z = xi(cfg, x)
    if not z > 0:
        raise DegenerateXi(f"xi vanishes at x={x!r}; at x = 0 the operator reproduces f(0)")
    h = math.sqrt(z)
    return abs(cfg.drift - 1.0) * x / h * w1(h) + constant * w2(h)


def uniform_modulus_bound(f, p: int, scheme: SequenceScheme, n: int, moduli=None, constant: float = 1.0) -> float:
    """|1 - drift| sqrt(b_n) w1(h) + C w2(h) with h = (b_n (1-beta)^3)^-1/2."""
    w1, w2 = _moduli(f, moduli)
    cfg = OperatorConfig.from_scheme(scheme, n)
    h = 1.0 / math.sqrt(cfg.b_n * (1.0 - cfg.beta) ** 3)
    return abs(1.0 - cfg.drift) * math.sqrt(cfg.b_n) * w1(h) + constant * w2(h)


def estimate_constant(measured_errors, breakdowns) -> float:
    """Smallest C >= 0 with measured <= drift + C * smooth on every cell.

    Cells whose smooth term vanishes carry no information about C.
    """
    measured = list(measured_errors)
    breakdowns = list(breakdowns)
    if not measured or len(measured) != len(breakdowns):
        raise EmptyDataset("need a nonempty, aligned set of errors and breakdowns")
    ratios = [
        (e - bd.drift_term) / bd.smooth_term
        for e, bd in zip(measured, breakdowns)
        if bd.smooth_term > 0
    ]
    return max([0.0, *ratios])


def derivative_norms(f, p: int, grid=DEFAULT_GRID) -> tuple[float, float]:
    """(||f'||_p, ||f''||_p) on the grid from the analytic derivatives of ``f``."""
    if getattr(f, "d1", None) is None or getattr(f, "d2", None) is None:
        raise ValueError(f"{getattr(f, 'name', f)!r} has no analytic derivatives")
    return weighted_norm(f.d1, p, grid), weighted_norm(f.d2, p, grid)


@dataclass(frozen=True)
class SchemeComparison:
    n: int
    x: float
    modified_error: float
    original_error: float

    @property
    def winner(self) -> str:
        if self.modified_error < self.original_error:
            return "modified"
        if self.modified_error > self.original_error:
            return "original"
        return "tie"


def compare_schemes(f, n_list, r: float, x_grid, growth_p: int | None = None) -> list[SchemeComparison]:
    """|J - f| under a_n = n^r + 1/n, b_n = n^r against a_n = b_n = n, beta = 0."""
    modified = SequenceScheme.power_shift(r)
    original = SequenceScheme.identity()
    rows = []
    for n in n_list:
        cm = OperatorConfig.from_scheme(modified, n)
        co = OperatorConfig.from_scheme(original, n)
        for x in x_grid:
            fx = float(eval_vectorized(f, np.array([float(x)]))[0])
            rows.append(SchemeComparison(
                n, float(x),
                abs(evaluate_J(f, cm, x, growth_p) - fx),
                abs(evaluate_J(f, co, x, growth_p) - fx),
            ))
    return rows

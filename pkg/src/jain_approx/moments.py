"""Raw and central moments of J_n, the Stirling expansion, lambda
coefficients and the rate functional xi_{n,beta}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .abel import AbelParams, s_series
from .errors import IllConditionedFit, UnsupportedOrder
from .operators import OperatorConfig, evaluate_J
from .sequences import SequenceScheme, scheme_values

MAX_LAMBDA_ORDER = 6


@dataclass(frozen=True)
class MomentReport:
    order: int
    series_value: float
    closed_value: float | None = None
    stirling_value: float | None = None

    @property
    def abs_gap(self) -> float | None:
        if self.closed_value is None:
            return None
        return abs(self.closed_value - self.series_value)


def raw_moment_closed(r: int, cfg: OperatorConfig, x: float) -> float:
    """J(t^r; x) for r <= 4 from the closed polynomials in x."""
    a, b, beta = cfg.a_n, cfg.b_n, cfg.beta
    q = 1.0 - beta
    u = a * x  # every term is a polynomial in a_n x
    if r == 0:
        return 1.0
    if r == 1:
        return u / (b * q)
    if r == 2:
        return math.fsum([u**2 / (q**2 * b**2), u / (q**3 * b**2)])
    if r == 3:
        return math.fsum([
            u**3 / (q**3 * b**3),
            3 * u**2 / (q**4 * b**3),
            u * (1 + 2 * beta) / (q**5 * b**3),
        ])
    if r == 4:
        return math.fsum([
            u**4 / (q**4 * b**4),
            6 * u**3 / (q**5 * b**4),
            u**2 * (7 + 8 * beta) / (q**6 * b**4),
            u * (1 + 8 * beta + 6 * beta**2) / (q**7 * b**4),
        ])
    raise UnsupportedOrder(f"closed raw moments exist for r <= 4, got {r}")


def central_moment_closed(m: int, cfg: OperatorConfig, x: float) -> float:
    """J((t - x)^m; x) for 1 <= m <= 4 from the closed expressions."""
    a, b, beta = cfg.a_n, cfg.b_n, cfg.beta
    q = 1.0 - beta
    e = a / (q * b) - 1.0
    if m == 1:
        return e * x
    if m == 2:
        return math.fsum([x**2 * e**2, x * a / (q**3 * b**2)])
    if m == 3:
        return math.fsum([
            x**3 * e**3,
            3 * x**2 * a / (b**2 * q**3) * e,
            x * a * (1 + 2 * beta) / (q**5 * b**3),
        ])
    if m == 4:
        return math.fsum([
            x**4 * e**4,
            6 * a * x**3 / (q**3 * b**2) * e**2,
            a * x**2 / (q**5 * b**3) * (a * (7 + 8 * beta) / (q * b) - 4 - 8 * beta),
            x * a * (1 + 8 * beta + 6 * beta**2) / (q**7 * b**4),
        ])
    raise UnsupportedOrder(f"closed central moments exist for 1 <= m <= 4, got {m}")


@lru_cache(maxsize=None)
def stirling2(r: int, j: int) -> int:
    """Stirling number of the second kind S2(r, j)."""
    if r < 0 or j < 0:
        raise ValueError("arguments must be nonnegative")
    if r == j:
        return 1
    if j == 0 or j > r:
        return 0
    return j * stirling2(r - 1, j) + stirling2(r - 1, j - 1)


def raw_moment_series(r: int, cfg: OperatorConfig, x: float, method: str = "direct") -> float:
    """J(t^r; x) for any r >= 0 by series.

    ``direct`` sums w(k) (k/b_n)^r. ``stirling`` expands k^r in falling
    factorials, whose expectations are a_n x S(j, a_n x + j beta, beta).
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if method == "direct":
        return evaluate_J(lambda t: t**r, cfg, x, growth_p=r)
    if method != "stirling":
        raise ValueError(f"unknown method {method!r}")
    if r == 0:
        return 1.0
    if x == 0:
        return 0.0
    u = cfg.a_n * x
    terms = [
        stirling2(r, j) * s_series(j, AbelParams(u + j * cfg.beta, cfg.beta), cfg.truncation)
        for j in range(1, r + 1)
    ]
    return u / cfg.b_n**r * math.fsum(terms)


def central_moment_series(m: int, cfg: OperatorConfig, x: float, absolute: bool = False) -> float:
    """J((t - x)^m; x) summed directly (``absolute`` sums |t - x|^m)."""
    if absolute:
        return evaluate_J(lambda t: np.abs(t - x) ** m, cfg, x, growth_p=m)
    return evaluate_J(lambda t: (t - x) ** m, cfg, x, growth_p=m)


def moment_report(r: int, cfg: OperatorConfig, x: float) -> MomentReport:
    closed = raw_moment_closed(r, cfg, x) if r <= 4 else None
    stirling = raw_moment_series(r, cfg, x, "stirling") if r <= MAX_LAMBDA_ORDER else None
    return MomentReport(r, raw_moment_series(r, cfg, x), closed, stirling)


_LAMBDA_CFG = OperatorConfig(1, 1.0, 1.0)


def extract_lambda(r: int, beta: float, cfg: OperatorConfig | None = None) -> list[float]:
    """Coefficients lambda_{r,1..r} of

        J(t^r; x) = (b_n (1-beta))^-r  sum_j lambda_{r,j} (a_n x)^j / (1-beta)^(r-j)

    recovered numerically: J(t^r; x) is sampled by series at x = 1..r, the
    Vandermonde system is solved, and the fit is checked at x = r + 1.
    ``cfg`` supplies a_n, b_n and the truncation policy; its beta is replaced.
    """
    if not 1 <= r <= MAX_LAMBDA_ORDER:
        raise ValueError(f"r must lie in 1..{MAX_LAMBDA_ORDER}")
    base = cfg or _LAMBDA_CFG
    cfg = OperatorConfig(base.n, base.a_n, base.b_n, beta, base.truncation, base.quadrature)
    a, b, q = cfg.a_n, cfg.b_n, 1.0 - beta

    xs = np.arange(1, r + 2, dtype=float)
    ys = np.array([raw_moment_series(r, cfg, x) for x in xs])
    vander = xs[:r, None] ** np.arange(1, r + 1)[None, :]
    coef = np.linalg.solve(vander, ys[:r])
    check = float(np.polyval(np.concatenate((coef[::-1], [0.0])), xs[r]))
    resid = abs(check - ys[r]) / abs(ys[r])
    if resid > 1e-6:
        raise IllConditionedFit(f"lambda fit for r={r} misses x={xs[r]:g} by {resid:.3g}")

    j = np.arange(1, r + 1)
    lam = coef * (b * q) ** r * q ** (r - j) / a**j
    return lam.tolist()


def lambda_closed(r: int, beta: float) -> list[float]:
    """lambda_{r,j} read off the closed raw moments, r <= 4."""
    table = {
        1: [1.0],
        2: [1.0, 1.0],
        3: [1 + 2 * beta, 3.0, 1.0],
        4: [1 + 8 * beta + 6 * beta**2, 7 + 8 * beta, 6.0, 1.0],
    }
    if r not in table:
        raise UnsupportedOrder(f"closed lambda coefficients exist for r <= 4, got {r}")
    return table[r]


def xi(cfg: OperatorConfig, x: float) -> float:
    """x^2 (a_n/(b_n(1-beta)) - 1)^2 + x / (b_n (1-beta)^3)."""
    q = 1.0 - cfg.beta
    return x**2 * (cfg.drift - 1.0) ** 2 + x / (cfg.b_n * q**3)


def scaled_limit_residuals(scheme: SequenceScheme, n: int, x: float) -> tuple[float, float, float, float]:
    """(b mu1, b mu2 - x, b mu3, b^2 mu4 - 3x^2) from the closed central moments."""
    a, b, beta = scheme_values(scheme, n)
    cfg = OperatorConfig(n, a, b, beta)
    mu = [central_moment_closed(m, cfg, x) for m in (1, 2, 3, 4)]
    return (b * mu[0], b * mu[1] - x, b * mu[2], b**2 * mu[3] - 3 * x**2)

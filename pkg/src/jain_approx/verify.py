"""Self-check suite: every identity the library relies on, each reported
as a named check with its worst residual."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .abel import AbelParams, normalization_defect, s_closed, s_recurrence_residual, s_series
from .bounds import derivative_norms, estimate_constant, smooth_bound
from .functions import builtin
from .moments import (
    central_moment_closed,
    central_moment_series,
    extract_lambda,
    lambda_closed,
    raw_moment_closed,
    raw_moment_series,
    scaled_limit_residuals,
    stirling2,
)
from .operators import OperatorConfig, evaluate_J
from .sequences import BetaRule, SequenceScheme
from .spaces import GridSpec

ALPHAS = (0.5, 1.0, 5.0, 20.0, 50.0)
BETAS = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)
MOMENT_CFGS = ((10.0, 10.0), (25.2, 25.0), (100.0, 100.0))
MOMENT_BETAS = (0.0, 0.1, 0.5)
MOMENT_XS = (0.0, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{tag} {self.name}: residual {self.residual:.3e} (tol {self.tolerance:.1e}){extra}"


@dataclass
class SuiteResult:
    level: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        out = [c.line() for c in self.checks]
        n_ok = len(self.checks) - len(self.failures)
        out.append(f"{self.level}: {n_ok}/{len(self.checks)} checks passed in {self.seconds:.2f} s")
        return out


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def check_normalization() -> Check:
    worst = max(normalization_defect(AbelParams(a, b)) for a in ALPHAS for b in BETAS)
    return Check("normalization", worst, 1e-10)


def check_s_closed() -> Check:
    worst = 0.0
    for a in ALPHAS:
        for b in BETAS:
            for r in (1, 2, 3, 4):
                ref = s_closed(r, a, b)
                worst = max(worst, abs(s_series(r, AbelParams(a, b)) - ref) / abs(ref))
    exact = max(abs(s_closed(1, a, 0.5) - 2.0) for a in ALPHAS)
    exact = max(exact, abs(s_closed(2, 1.0, 0.5) - 6.0))
    return Check("s_closed_vs_series", max(worst, exact), 1e-8)


def check_s_recurrence() -> Check:
    worst = max(
        abs(s_recurrence_residual(r, a, b)) / s_series(r, AbelParams(a, b))
        for a in ALPHAS for b in BETAS for r in (1, 2, 3)
    )
    return Check("s_recurrence", worst, 1e-8)


def _moment_grid():
    for a, b in MOMENT_CFGS:
        for beta in MOMENT_BETAS:
            cfg = OperatorConfig(1, a, b, beta)
            for x in MOMENT_XS:
                yield cfg, x


def check_raw_moments() -> Check:
    worst = 0.0
    for cfg, x in _moment_grid():
        for r in range(5):
            worst = max(worst, _rel(raw_moment_series(r, cfg, x), raw_moment_closed(r, cfg, x)))
    spot = abs(raw_moment_closed(2, OperatorConfig(1, 10.0, 10.0, 0.1), 1.0) - 1.3717421124828532)
    return Check("raw_moments_closed_vs_series", max(worst, spot), 1e-8)


def check_central_moments() -> Check:
    # Odd central moments are differences of nearly equal terms; scale by
    # the absolute moment, which is the natural size of the rounding error.
    worst = 0.0
    for cfg, x in _moment_grid():
        for m in range(1, 5):
            ref = central_moment_series(m, cfg, x)
            scale = max(1.0, central_moment_series(m, cfg, x, absolute=True))
            worst = max(worst, abs(central_moment_closed(m, cfg, x) - ref) / scale)
    return Check("central_moments_closed_vs_series", worst, 1e-8)


def check_stirling() -> Check:
    rows = {1: [1], 2: [1, 1], 3: [1, 3, 1], 4: [1, 7, 6, 1]}
    bad = sum(stirling2(r, j + 1) != c for r, row in rows.items() for j, c in enumerate(row))
    worst = float(bad)
    for a, b in MOMENT_CFGS:
        for beta in MOMENT_BETAS:
            cfg = OperatorConfig(1, a, b, beta)
            for x in (0.5, 2.0):
                for r in range(1, 7):
                    d = raw_moment_series(r, cfg, x, "direct")
                    s = raw_moment_series(r, cfg, x, "stirling")
                    worst = max(worst, abs(d - s) / abs(d))
    return Check("stirling_vs_direct", worst, 1e-8)


def check_lambda() -> Check:
    worst = 0.0
    for beta in (0.0, 0.2, 0.5):
        for r in range(1, 5):
            got = extract_lambda(r, beta)
            want = lambda_closed(r, beta)
            worst = max(worst, max(abs(g - w) / w for g, w in zip(got, want)))
        worst = max(worst, abs(extract_lambda(5, beta)[-1] - 1.0))
        if min(extract_lambda(5, beta)) <= 0:
            worst = math.inf
    return Check("lambda_coefficients", worst, 1e-8)


QUICK_CHECKS = (
    check_normalization,
    check_s_closed,
    check_s_recurrence,
    check_raw_moments,
    check_central_moments,
    check_stirling,
    check_lambda,
)


def _scaled_limit_checks(n: int = 10_000, n_ref: int = 100) -> list[Check]:
    """One check per residual component, with the component's own tolerance
    and the requirement that it shrinks from n_ref to n."""
    scheme = SequenceScheme.identity(BetaRule("inverse_n"))
    names = ("b_mu1", "b_mu2_minus_x", "b_mu3", "b2_mu4_minus_3x2")
    worst = [0.0] * 4
    shrink = [True] * 4
    for x in (0.5, 1.0, 2.0):
        tols = (1e-3, 2e-3 * max(1.0, x), 1e-2, 1e-2 * max(1.0, 3 * x * x))
        big = scaled_limit_residuals(scheme, n, x)
        small_n = scaled_limit_residuals(scheme, n_ref, x)
        for i in range(4):
            worst[i] = max(worst[i], abs(big[i]) / tols[i])
            shrink[i] = shrink[i] and abs(big[i]) < abs(small_n[i])
    return [
        Check(f"scaled_limit_{nm}", worst[i] if shrink[i] else math.inf, 1.0,
              f"(residual / tolerance at n={n}{'' if shrink[i] else ', not shrinking'})")
        for i, nm in enumerate(names)
    ]


def rate_study(f, n_list=(50, 100, 200, 400), x_max: float = 5.0, x_count: int = 101):
    """Sup-errors of J_n f - f over [0, x_max] and the fitted bound constant
    per n (identity scheme, beta = 0)."""
    x = np.linspace(0.0, x_max, x_count)
    norms = derivative_norms(f, 0, GridSpec(20.0, 2001))
    fx = f(x)
    errors, constants = [], []
    for n in n_list:
        cfg = OperatorConfig.classical(n)
        e = np.abs(np.array([evaluate_J(f, cfg, xx) for xx in x]) - fx)
        errors.append(float(e.max()))
        constants.append(estimate_constant(e, [smooth_bound(norms, cfg, xx) for xx in x]))
    return errors, constants


def _rate_checks() -> list[Check]:
    out = []
    for name in ("exp_decay", "sine", "runge"):
        errors, consts = rate_study(builtin(name))
        ratio = max(errors[i + 1] / errors[i] for i in range(len(errors) - 1))
        spread = max(consts) / min(consts) - 1.0
        out.append(Check(f"rate_{name}_halving", ratio, 0.7))
        out.append(Check(f"rate_{name}_constant_spread", spread, 0.2))
    return out


def verify_suite(level: str = "quick") -> SuiteResult:
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    start = time.perf_counter()
    result = SuiteResult(level, [c() for c in QUICK_CHECKS])
    if level == "full":
        result.checks.extend(_scaled_limit_checks())
        result.checks.extend(_rate_checks())
    result.seconds = time.perf_counter() - start
    return result

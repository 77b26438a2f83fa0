"""Generalized Poisson (Abel) weights and the auxiliary series S(r, alpha, beta).

The weight of index ``k`` is

    w(k; alpha, beta) = alpha (alpha + k beta)^(k-1) exp(-(alpha + k beta)) / k!

and is always evaluated in log space; the direct product overflows once
``k`` passes roughly 150.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import TruncationNotConverged, UnsupportedOrder

__all__ = [
    "AbelParams",
    "TruncationPolicy",
    "DEFAULT_POLICY",
    "log_weight",
    "log_weights",
    "weight",
    "weights_until",
    "normalization_defect",
    "truncation_index",
    "s_series",
    "s_closed",
    "s_recurrence_residual",
]


@dataclass(frozen=True)
class AbelParams:
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha!r}")
        if not (0.0 <= self.beta < 1.0):
            raise ValueError(f"beta must lie in [0, 1), got {self.beta!r}")

    @property
    def bulk(self) -> float:
        """Mean of the distribution, alpha / (1 - beta)."""
        return self.alpha / (1.0 - self.beta)


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rule for the infinite sums over k.

    Summation runs in ascending k and stops once ``streak`` consecutive
    growth-adjusted terms past the distribution mean are smaller than
    ``rel_tol`` times the running sum.  Each term is inflated by the
    geometric tail factor 1 / (1 - ratio of consecutive terms), so slowly
    decaying tails (beta close to 1) are not cut off early.
    """

    rel_tol: float = 1e-14
    streak: int = 10
    k_max: int = 2_000_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.streak < 1 or self.k_max < 1:
            raise ValueError("streak and k_max must be at least 1")


DEFAULT_POLICY = TruncationPolicy()

_FIRST_BLOCK = 64


def series_sum(terms: np.ndarray) -> float:
    """Correctly rounded sum of the significant terms plus a plain sum of
    the rest.

    Terms below 2^-60 of the largest magnitude cannot move the result by
    more than an ulp in total but make fsum much slower, so they are added
    separately.  The split depends only on the values, so the result is
    reproducible.
    """
    terms = np.asarray(terms, dtype=np.float64)
    if terms.size == 0:
        return 0.0
    mags = np.abs(terms)
    big = mags >= mags.max() * 2.0**-60
    return math.fsum(terms[big].tolist()) + float(np.sum(terms[~big]))


def log_weights(k, alpha: float, beta: float) -> np.ndarray:
    """Vectorised log w(k; alpha, beta) for an array of nonnegative integers."""
    k = np.asarray(k, dtype=np.float64)
    lam = alpha + beta * k
    return math.log(alpha) + (k - 1.0) * np.log(lam) - lam - gammaln(k + 1.0)


def log_weight(k: int, p: AbelParams) -> float:
    return float(log_weights(np.array([k]), p.alpha, p.beta)[0])


def weight(k: int, p: AbelParams) -> float:
    return math.exp(log_weight(k, p))


def weights_until(
    p: AbelParams,
    growth: Callable[[np.ndarray], np.ndarray],
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Weights w(0..K) where K is the first index meeting the stopping rule.

    ``growth(k)`` multiplies each weight before the rule is applied, so the
    rule controls the tail of sum_k w(k) growth(k) rather than of the bare
    weights.  Blocks have a fixed size sequence, so the returned array (and
    hence K) depends only on the arguments.
    """
    bulk = p.bulk
    chunks = []
    total = 0.0
    prev = np.nan
    run = 0
    start = 0
    size = _FIRST_BLOCK + int(2 * bulk + 10 * math.sqrt(bulk / (1.0 - p.beta) ** 2))
    while start <= pol.k_max:
        stop = min(start + size, pol.k_max + 1)
        k = np.arange(start, stop)
        w = np.exp(log_weights(k, p.alpha, p.beta))
        adj = w * growth(k)
        cum = total + np.cumsum(adj)
        before = np.concatenate(([prev], adj[:-1]))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = adj / before
            tail = np.where(ratio < 1.0, adj / (1.0 - ratio), np.inf)
        tail[adj == 0.0] = 0.0  # underflowed terms
        small = (tail < pol.rel_tol * cum) & (k > bulk)

        idx = np.arange(k.size)
        last_big = np.maximum.accumulate(np.where(small, -1, idx))
        streak = np.where(last_big < 0, idx + 1 + run, idx - last_big)
        hit = np.flatnonzero(streak >= pol.streak)
        if hit.size:
            chunks.append(w[: hit[0] + 1])
            return np.concatenate(chunks)

        chunks.append(w)
        run = int(streak[-1])
        total = float(cum[-1])
        prev = adj[-1]
        start = stop
        size *= 2
    raise TruncationNotConverged(p.alpha, p.beta, pol.k_max)


def polynomial_growth(growth_p: int, b_n: float):
    return lambda k: 1.0 + (k / b_n) ** growth_p


def truncation_index(
    p: AbelParams,
    growth_p: int = 0,
    b_n: float = 1.0,
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> int:
    """Last index K kept when summing a function of growth class ``growth_p``."""
    return weights_until(p, polynomial_growth(growth_p, b_n), pol).size - 1


def normalization_defect(p: AbelParams, pol: TruncationPolicy = DEFAULT_POLICY) -> float:
    """|1 - sum_k w(k)| for the truncated sum."""
    w = weights_until(p, lambda k: np.ones(k.shape), pol)
    return abs(1.0 - series_sum(w))


def s_series(r: int, p: AbelParams, pol: TruncationPolicy = DEFAULT_POLICY) -> float:
    """S(r, alpha, beta) = sum_k (alpha + beta k)^(k+r-1) e^-(alpha + beta k) / k!.

    Each term equals w(k) (alpha + beta k)^r / alpha, which is how it is
    computed.  ``r = 0`` returns 1/alpha by convention.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return 1.0 / p.alpha

    def growth(k):
        return (p.alpha + p.beta * k) ** r

    w = weights_until(p, growth, pol)
    k = np.arange(w.size)
    return series_sum(w * growth(k)) / p.alpha


def s_closed(r: int, alpha: float, beta: float) -> float:
    """Closed forms of S(r, alpha, beta) for r = 1..4."""
    q = 1.0 - beta
    if r == 1:
        return 1.0 / q
    if r == 2:
        return alpha / q**2 + beta**2 / q**3
    if r == 3:
        return alpha**2 / q**3 + 3 * alpha * beta**2 / q**4 + (beta**3 + 2 * beta**4) / q**5
    if r == 4:
        return (
            alpha**3 / q**4
            + 6 * alpha**2 * beta**2 / q**5
            + (4 * alpha * beta**3 + 11 * alpha * beta**4) / q**6
            + (beta**4 + 8 * beta**5 + 6 * beta**6) / q**7
        )
    raise UnsupportedOrder(f"closed form of S is only known for r in 1..4, got {r}")


def s_recurrence_residual(
    r: int, alpha: float, beta: float, pol: TruncationPolicy = DEFAULT_POLICY
) -> float:
    """S(r, a, b) - a S(r-1, a, b) - b S(r, a+b, b), every S by series."""
    if r < 1:
        raise ValueError("recurrence needs r >= 1")
    p = AbelParams(alpha, beta)
    shifted = AbelParams(alpha + beta, beta)
    return s_series(r, p, pol) - alpha * s_series(r - 1, p, pol) - beta * s_series(r, shifted, pol)

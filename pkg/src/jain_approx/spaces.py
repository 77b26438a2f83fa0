"""Polynomial weights, weighted sup-norms, moduli of continuity and
smoothness, and Steklov means.

Every supremum over [0, inf) is replaced by a maximum over a finite grid,
so the norms and moduli computed here are lower estimates of the true
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import eval_vectorized, gauss_interval, gauss_square


@dataclass(frozen=True)
class GridSpec:
    x_max: float = 20.0
    x_count: int = 2001
    h_count: int = 64

    def __post_init__(self):
        if not self.x_max > 0 or self.x_count < 2 or self.h_count < 1:
            raise ValueError("need x_max > 0, x_count >= 2 and h_count >= 1")

    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.x_count)

    def shifts(self, t: float) -> np.ndarray:
        """Geometric h-grid on (0, t], always containing t itself."""
        if t <= 0:
            return np.zeros(1)
        return np.geomspace(t * 1e-3, t, self.h_count)


DEFAULT_GRID = GridSpec()


def _points(grid) -> np.ndarray:
    if isinstance(grid, GridSpec):
        return grid.points()
    return np.asarray(grid, dtype=np.float64)


def omega_p(p: int, x):
    """Weight 1 for p = 0 and 1/(1 + x^p) otherwise."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    w = np.ones_like(x) if p == 0 else 1.0 / (1.0 + x**p)
    return w if w.ndim else float(w)


def rho(x):
    return 1.0 / (1.0 + np.asarray(x, dtype=np.float64) ** 2)


def weighted_norm(f, p: int, grid=DEFAULT_GRID) -> float:
    """max over the grid of omega_p(x) |f(x)|."""
    x = _points(grid)
    return float(np.max(omega_p(p, x) * np.abs(eval_vectorized(f, x))))


def _modulus(f, p, t, grid, order):
    spec = grid if isinstance(grid, GridSpec) else DEFAULT_GRID
    x = _points(grid)[:, None]
    h = spec.shifts(t)[None, :]
    if order == 1:
        diff = eval_vectorized(f, x + h) - eval_vectorized(f, x)
    else:
        diff = eval_vectorized(f, x) - 2.0 * eval_vectorized(f, x + h) + eval_vectorized(f, x + 2.0 * h)
    return float(np.max(omega_p(p, x) * np.abs(diff)))


def modulus1(f, p: int, t: float, grid=DEFAULT_GRID) -> float:
    """Grid estimate of sup_{0<=h<=t} ||f(. + h) - f||_p."""
    return _modulus(f, p, t, grid, 1)


def modulus2(f, p: int, t: float, grid=DEFAULT_GRID) -> float:
    """Grid estimate of sup_{0<=h<=t} ||f - 2 f(. + h) + f(. + 2h)||_p."""
    return _modulus(f, p, t, grid, 2)


def _shape_out(x, values):
    return values if np.ndim(x) else float(values)


def steklov(f, h: float, x):
    """Steklov mean (4/h^2) * double integral over [0, h/2]^2 of
    2 f(x+s+t) - f(x + 2(s+t)).

    Constants and affine functions are reproduced exactly.
    """
    if not h > 0:
        raise ValueError("h must be positive")

    def g(xx, s, t):
        u = s + t
        return 2.0 * eval_vectorized(f, xx + u) - eval_vectorized(f, xx + 2.0 * u)

    return _shape_out(x, 4.0 / h**2 * gauss_square(g, x, h / 2.0))


def steklov_d1(f, h: float, x):
    """First derivative of the Steklov mean as a single integral."""
    if not h > 0:
        raise ValueError("h must be positive")

    def g(xx, s):
        d_half = eval_vectorized(f, xx + s + h / 2.0) - eval_vectorized(f, xx + s)
        d_full = eval_vectorized(f, xx + 2.0 * s + h) - eval_vectorized(f, xx + 2.0 * s)
        return 8.0 * d_half - 2.0 * d_full

    return _shape_out(x, gauss_interval(g, x, h / 2.0) / h**2)


def second_difference(f, h: float, x):
    x = np.asarray(x, dtype=np.float64)
    return eval_vectorized(f, x) - 2.0 * eval_vectorized(f, x + h) + eval_vectorized(f, x + 2.0 * h)


def steklov_d2(f, h: float, x):
    """Second derivative of the Steklov mean, (8 D2_{h/2} f - D2_h f) / h^2."""
    if not h > 0:
        raise ValueError("h must be positive")
    out = (8.0 * second_difference(f, h / 2.0, x) - second_difference(f, h, x)) / h**2
    return _shape_out(x, out)


def rho_weighted_error(f, op_values, x_grid, p: int) -> float:
    """max over the grid of omega_p(x) rho(x) |op(x) - f(x)|."""
    x = np.asarray(x_grid, dtype=np.float64)
    op_values = np.asarray(op_values, dtype=np.float64)
    if op_values.shape != x.shape:
        raise ValueError("op_values must align with x_grid")
    err = np.abs(op_values - eval_vectorized(f, x))
    return float(np.max(omega_p(p, x) * rho(x) * err))

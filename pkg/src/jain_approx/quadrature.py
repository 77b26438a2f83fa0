"""Quadrature rules: breadth-first adaptive Simpson over many cells, and
composite tensor Gauss-Legendre on a square."""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteFunctionValue, QuadratureNotConverged, JainError

MIN_PANEL_WIDTH = 1e-15


def eval_vectorized(f, t: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array, falling back to a scalar loop when ``f``
    does not broadcast.  Non-finite results raise NonFiniteFunctionValue."""
    t = np.asarray(t, dtype=np.float64)
    try:
        out = np.asarray(f(t), dtype=np.float64)
        if out.shape != t.shape:
            out = np.broadcast_to(out, t.shape).astype(np.float64)
    except JainError:
        raise
    except (TypeError, ValueError):
        out = np.array([float(f(float(v))) for v in t.ravel()]).reshape(t.shape)
    if not np.all(np.isfinite(out)):
        bad = t[~np.isfinite(out)].ravel()[0]
        raise NonFiniteFunctionValue(f"function value at t={bad!r} is not finite")
    return out


def simpson_cells(f, lo, hi, abs_tol: float = 1e-12, max_depth: int = 50) -> np.ndarray:
    """Integrate ``f`` over each interval [lo[i], hi[i]] by adaptive Simpson.

    All cells are refined together, one level per pass, with the usual
    tolerance halving on subdivision and Richardson correction on
    acceptance.  Panels narrower than ``MIN_PANEL_WIDTH`` are accepted as
    they stand.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
    ncell = lo.size
    owner = np.arange(ncell)
    a, b = lo, hi
    m = 0.5 * (a + b)
    fa, fm, fb = eval_vectorized(f, a), eval_vectorized(f, m), eval_vectorized(f, b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tol = np.full(ncell, float(abs_tol))

    owners, values = [], []
    for depth in range(max_depth + 1):
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = eval_vectorized(f, lm), eval_vectorized(f, rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        done = (np.abs(delta) <= 15.0 * tol) | (m - a < MIN_PANEL_WIDTH)
        owners.append(owner[done])
        values.append((left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        if depth == max_depth:
            worst = owner[keep][0]
            raise QuadratureNotConverged(
                f"adaptive Simpson on [{lo[worst]!r}, {hi[worst]!r}] exceeded depth {max_depth}"
            )
        # children in (left, right) order, interleaved per parent
        a2 = np.stack([a[keep], m[keep]], axis=1).ravel()
        b2 = np.stack([m[keep], b[keep]], axis=1).ravel()
        fa2 = np.stack([fa[keep], fm[keep]], axis=1).ravel()
        fm2 = np.stack([flm[keep], frm[keep]], axis=1).ravel()
        fb2 = np.stack([fm[keep], fb[keep]], axis=1).ravel()
        whole = np.stack([left[keep], right[keep]], axis=1).ravel()
        tol = np.repeat(tol[keep] / 2.0, 2)
        owner = np.repeat(owner[keep], 2)
        a, b, fa, fm, fb = a2, b2, fa2, fm2, fb2
        m = 0.5 * (a + b)

    return np.bincount(np.concatenate(owners), weights=np.concatenate(values), minlength=ncell)


def adaptive_simpson(f, a: float, b: float, abs_tol: float = 1e-12, max_depth: int = 50) -> float:
    return float(simpson_cells(f, [a], [b], abs_tol, max_depth)[0])


def _gauss_panels(width: float, panels: int, order: int):
    nodes, wts = np.polynomial.legendre.leggauss(order)
    step = width / panels
    starts = np.arange(panels) * step
    pts = (starts[:, None] + 0.5 * step * (nodes[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * step * wts, panels)
    return pts, w


def gauss_square(
    g, x, width: float, order: int = 12, max_panels: int = 8, rtol: float = 1e-11
) -> np.ndarray:
    """Integral over (s, t) in [0, width]^2 of g(x, s, t), for each x.

    ``g`` receives broadcastable arrays. The panel count doubles until two
    successive estimates agree to ``rtol``.
    """
    x = np.asarray(x, dtype=np.float64)
    prev = None
    panels = 1
    while panels <= max_panels:
        pts, w = _gauss_panels(width, panels, order)
        s, t = pts[:, None], pts[None, :]
        vals = g(x[..., None, None], s, t)
        est = np.einsum("...ij,i,j->...", vals, w, w)
        if prev is not None and np.all(np.abs(est - prev) <= rtol * np.maximum(1.0, np.abs(est))):
            return est
        prev = est
        panels *= 2
    raise QuadratureNotConverged(f"tensor Gauss rule did not settle with {max_panels} panels")


def gauss_interval(
    g, x, width: float, order: int = 12, max_panels: int = 64, rtol: float = 1e-11
) -> np.ndarray:
    """Integral over s in [0, width] of g(x, s), for each x."""
    x = np.asarray(x, dtype=np.float64)
    prev = None
    panels = 1
    while panels <= max_panels:
        pts, w = _gauss_panels(width, panels, order)
        est = g(x[..., None], pts) @ w
        if prev is not None and np.all(np.abs(est - prev) <= rtol * np.maximum(1.0, np.abs(est))):
            return est
        prev = est
        panels *= 2
    raise QuadratureNotConverged(f"Gauss rule did not settle with {max_panels} panels")

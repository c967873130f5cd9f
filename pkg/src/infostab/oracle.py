"""Independent brute-force checks: sup-norm fitting and exhaustive residual tables.

Nothing here imports the stability pipeline; the point of this module is to
reach the same numbers by a different road.

The minimax fits solve  min_{s,t} max_i |y_i - s*phi_i - t*psi_i|  over a
two-function basis.  The objective is convex, so its profile
``P(s) = min_t obj(s, t)`` is convex too, and nested golden-section searches
(inner over t, outer over s) converge to the global minimum.  The outer
bracket comes from a coarse grid scan of P; a least-squares start gives a
provable box for both coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_alpha
from .errors import DegenerateBasis, DegenerateGrid

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
MIN_GRID = 200


@dataclass(frozen=True)
class PowerFit:
    a: float
    b: float
    dev: float


@dataclass(frozen=True)
class LogFit2:
    lam: float
    c: float
    dev: float


def _golden(fun, lo, hi, xtol, ftol=1e-12, max_iter=200):
    """Minimise a unimodal function on [lo, hi]; returns (argmin, min)."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = fun(c), fun(d)
    best = min(fc, fd)
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = fun(d)
        new_best = min(fc, fd)
        # stop once the minimax value has settled
        if abs(best - new_best) < ftol * max(1.0, abs(new_best)) and hi - lo <= 1e3 * xtol:
            best = new_best
            break
        best = new_best
    x = c if fc <= fd else d
    return x, min(fc, fd)


def _minimax2(phi, psi, y, coarse=41):
    """Sup-norm fit y ~ s*phi + t*psi; returns (s, t, dev)."""
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    y = np.asarray(y, dtype=float)
    sp = float(np.max(np.abs(phi)))
    st = float(np.max(np.abs(psi)))
    if sp == 0.0 or st == 0.0:
        raise DegenerateBasis("a basis function vanishes on the grid")
    P = phi / sp
    Q = psi / st
    A = np.column_stack([P, Q])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateBasis("basis functions are numerically collinear on the grid")
    theta0, *_ = np.linalg.lstsq(A, y, rcond=None)

    def obj(s, t):
        return float(np.max(np.abs(y - s * P - t * Q)))

    r0 = obj(*theta0)
    if r0 == 0.0:
        return theta0[0] / sp, theta0[1] / st, 0.0
    # any minimiser lies within this l2 radius of the least-squares point
    radius = 2.0 * r0 * math.sqrt(y.size) / sv[-1]
    scale = max(1.0, abs(theta0[0]), abs(theta0[1]))
    xtol = 1e-15 * scale + 1e-16 * radius

    def profile(s):
        return _golden(lambda t: obj(s, t), theta0[1] - radius, theta0[1] + radius, xtol)

    grid = np.linspace(theta0[0] - radius, theta0[0] + radius, coarse)
    vals = [profile(s)[1] for s in grid]
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, coarse - 1)]
    s_best, _ = _golden(lambda s: profile(s)[1], lo, hi, xtol)
    t_best, dev = profile(s_best)
    if dev > r0:
        s_best, t_best, dev = theta0[0], theta0[1], r0
    return s_best / sp, t_best / st, dev


def _grid(x_grid):
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size < MIN_GRID:
        raise DegenerateGrid(f"the oracle needs at least {MIN_GRID} grid points")
    if np.any((x <= 0.0) | (x >= 1.0)):
        raise DegenerateGrid("grid points must lie in (0, 1)")
    return x


def chebyshev_fit_power(f, alpha, x_grid) -> PowerFit:
    """Best sup-norm member of {a x^alpha + b((1-x)^alpha - 1)} on the grid."""
    al = as_alpha(alpha).value
    if al == 0.0 or abs(al) <= 0.01:
        raise DegenerateBasis("x^alpha and (1-x)^alpha - 1 degenerate as alpha -> 0")
    x = _grid(x_grid)
    y = np.asarray(f(x), dtype=float)
    a, b, dev = _minimax2(x**al, (1.0 - x) ** al - 1.0, y)
    return PowerFit(a=float(a), b=float(b), dev=float(dev))


def chebyshev_fit_log(f, x_grid) -> LogFit2:
    """Best sup-norm member of {lam ln(1-x) + c} on the grid."""
    x = _grid(x_grid)
    y = np.asarray(f(x), dtype=float)
    lam, c, dev = _minimax2(np.log1p(-x), np.ones_like(x), y)
    return LogFit2(lam=float(lam), c=float(c), dev=float(dev))


def sup_deviation_of(f, evaluate, x_grid) -> float:
    x = np.asarray(x_grid, dtype=float)
    return float(np.max(np.abs(np.asarray(f(x), dtype=float) - evaluate(x))))


@dataclass(frozen=True)
class ResidualTable:
    grid: np.ndarray
    table: np.ndarray  # NaN where (x_i, y_j) is not admissible

    @property
    def eps_hat(self) -> float:
        return float(np.nanmax(np.abs(self.table)))

    def nearest(self, x, y) -> float:
        i = int(np.argmin(np.abs(self.grid - x)))
        j = int(np.argmin(np.abs(self.grid - y)))
        return float(self.table[i, j])


def brute_force_residual_table(f, alpha, k: int = 200, margin: float = 1e-4) -> ResidualTable:
    """Residual on every point of the regular k x k grid clipped to the shrunk triangle."""
    if not 2 <= k <= 200:
        raise DegenerateGrid("grid density k must lie in [2, 200]")
    al = as_alpha(alpha).value
    t = np.linspace(margin, 1.0 - margin, k)
    X, Y = np.meshgrid(t, t, indexing="ij")
    ok = (X >= margin) & (Y >= margin) & (1.0 - X - Y >= margin)
    x, y = X[ok], Y[ok]
    with np.errstate(over="ignore", invalid="ignore"):
        lhs = f(x) + (1.0 - x) ** al * f(y / (1.0 - x))
        rhs = f(y) + (1.0 - y) ** al * f(x / (1.0 - y))
    table = np.full(X.shape, np.nan)
    table[ok] = lhs - rhs
    return ResidualTable(grid=t, table=table)

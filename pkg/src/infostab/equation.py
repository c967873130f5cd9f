"""Residual of the parametric fundamental equation of information.

For a function f on (0, 1) and exponent alpha the residual at (x, y) is::

    f(x) + (1-x)^alpha f(y/(1-x)) - f(y) - (1-y)^alpha f(x/(1-y))

defined on the open triangle {x, y, x+y in (0, 1)}.  This module evaluates it,
samples the triangle, and reduces sampled residuals to a sup-norm estimate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaincinv
from scipy.stats import qmc

from .core import as_alpha
from .errors import NonFiniteValue, OutOfDomain


class SamplerScheme(enum.Enum):
    UNIFORM_REJECTION = "uniform_rejection"
    HALTON = "halton"


def admissible(x, y, margin: float = 0.0) -> np.ndarray:
    """Mask of pairs at least ``margin`` inside the open triangle, inner arguments included."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = 1.0 - x - y
    ok = (x > margin) & (y > margin) & (z > margin) if margin == 0.0 else (
        (x >= margin) & (y >= margin) & (z >= margin)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        u = y / (1.0 - x)
        v = x / (1.0 - y)
    if margin > 0.0:
        ok &= (u >= margin) & (u <= 1.0 - margin) & (v >= margin) & (v <= 1.0 - margin)
    else:
        ok &= (u > 0.0) & (u < 1.0) & (v > 0.0) & (v < 1.0)
    return ok


@dataclass(frozen=True)
class OpenTriangleSampler:
    """Deterministic point set in the margin-shrunk open triangle.

    The Halton scheme pushes a scrambled 3-D Halton sequence through the
    inverse CDF of Gamma(concentration) and normalises, i.e. a quasi-random
    symmetric Dirichlet draw of the barycentric triple (x, y, 1-x-y).
    concentration=1 is the uniform distribution on the triangle; smaller
    values put more points near the edges and corners, where the weights
    (1-x)^alpha of negative exponents are largest.  A further ``rim_fraction``
    of the points is placed deterministically on the three edges of the
    shrunk triangle, geometrically graded toward its corners; for alpha < 0
    the sup of the residual is attained there.
    """

    count: int = 20_000
    margin: float = 1e-4
    seed: int = 0
    scheme: SamplerScheme = SamplerScheme.HALTON
    concentration: float = 0.25
    rim_fraction: float = 0.05

    def __post_init__(self):
        if int(self.count) < 1:
            raise OutOfDomain("sampler count must be positive")
        if not 0.0 < float(self.margin) < 0.25:
            raise OutOfDomain("sampler margin must lie in (0, 0.25)")
        if not 0 <= int(self.seed) < 2**64:
            raise OutOfDomain("seed must be a 64-bit unsigned integer")
        if not float(self.concentration) > 0.0:
            raise OutOfDomain("concentration must be positive")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "margin", float(self.margin))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "scheme", SamplerScheme(self.scheme))
        object.__setattr__(self, "concentration", float(self.concentration))
        if not 0.0 <= float(self.rim_fraction) < 1.0:
            raise OutOfDomain("rim_fraction must lie in [0, 1)")
        object.__setattr__(self, "rim_fraction", float(self.rim_fraction))

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """The sample as two read-only arrays (x, y); identical parameters give identical output."""
        rim = 0
        if self.scheme is SamplerScheme.HALTON:
            rim = min(self.count, int(round(self.rim_fraction * self.count)))
        return _sample_points(
            self.count, self.margin, self.seed, self.scheme, self.concentration, rim
        )


def rim_points(margin: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """About ``n`` points on the edges x=m, y=m, x+y=1-m, graded toward the corners."""
    if n <= 0:
        return np.empty(0), np.empty(0)
    m = margin
    span = 1.0 - 3.0 * m
    per_end = max(1, n // 6)
    # the first offset keeps the exact corner from being rounded out of the triangle
    d = np.concatenate([[1e-12], np.geomspace(m / 8.0, span / 2.0, per_end - 1)])
    t = np.unique(np.concatenate([m + d, 1.0 - 2.0 * m - d]))
    ms = np.full_like(t, m)
    x = np.concatenate([ms, t, t])
    y = np.concatenate([t, ms, 1.0 - m - t])
    keep = admissible(x, y, m)
    return x[keep], y[keep]


@lru_cache(maxsize=64)
def _sample_points(count, margin, seed, scheme, concentration, rim):
    rx, ry = rim_points(margin, rim)
    rx, ry = rx[:count], ry[:count]
    count -= rx.size
    if scheme is SamplerScheme.HALTON:
        source = qmc.Halton(d=3, scramble=True, seed=np.random.default_rng(seed))
    else:
        source = np.random.default_rng(seed)
    xs, ys, got = [], [], 0
    batch = max(1024, 2 * count)
    for _ in range(1000):
        if got >= count:
            break
        if scheme is SamplerScheme.HALTON:
            g = gammaincinv(concentration, source.random(batch))
            s = g / g.sum(axis=1, keepdims=True)
            x, y = s[:, 0], s[:, 1]
        else:
            u = source.random((batch, 2))
            x, y = u[:, 0], u[:, 1]
        with np.errstate(invalid="ignore"):
            keep = admissible(x, y, margin)
        xs.append(x[keep])
        ys.append(y[keep])
        got += int(keep.sum())
    else:
        raise OutOfDomain("sampler could not produce enough admissible points")
    x = np.concatenate([rx] + xs)[: count + rx.size]
    y = np.concatenate([ry] + ys)[: count + rx.size]
    x.setflags(write=False)
    y.setflags(write=False)
    return x, y


def residual(f, alpha, x, y):
    """Residual of the equation at (x, y); vectorised over array inputs.

    Evaluated as (A + B) - (C + D) so swapping x and y negates it exactly and
    the diagonal x == y gives exactly 0.
    """
    alpha = as_alpha(alpha)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    if not np.all(admissible(x, y)):
        raise OutOfDomain("(x, y) must lie in the open triangle x, y, x+y in (0, 1)")
    al = alpha.value
    with np.errstate(over="ignore", invalid="ignore"):
        lhs = f(x) + (1.0 - x) ** al * f(y / (1.0 - x))
        rhs = f(y) + (1.0 - y) ** al * f(x / (1.0 - y))
        r = np.asarray(lhs - rhs, dtype=float)
    bad = ~np.isfinite(r)
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        raise NonFiniteValue("non-finite residual", where=(float(x.ravel()[i]), float(y.ravel()[i])))
    return r if r.ndim else float(r)


@dataclass(frozen=True)
class ResidualSummary:
    eps_hat: float
    argmax: tuple
    p99: float
    samples: int


def sup_residual(f, alpha, sampler: OpenTriangleSampler) -> ResidualSummary:
    """Sampled sup-norm of the residual: the operational estimate of eps."""
    x, y = sampler.points()
    r = np.abs(residual(f, alpha, x, y))
    i = int(np.argmax(r))
    return ResidualSummary(
        eps_hat=float(r[i]),
        argmax=(float(x[i]), float(y[i])),
        p99=float(np.percentile(r, 99)),
        samples=int(r.size),
    )


# ---------------------------------------------------------------------------
# defect testers for the Cauchy-type helper equations


def _pairs(pairs):
    p = np.asarray(pairs, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise OutOfDomain("pairs must be an (n, 2) array")
    return p[:, 0], p[:, 1]


def _check_set(x, y, combined, lo, hi, positive, what):
    lower_ok = (lambda v: v > 0.0) if positive else (lambda v: v >= 0.0)
    for v in (x, y, combined):
        if not np.all(lower_ok(v) & (v >= lo) & (v <= hi)):
            raise OutOfDomain(f"pair outside the admissible set for the {what} equation")


def additive_defect(a_fn, pairs, interval=(0.0, 1.0)) -> float:
    """max |a(x+y) - a(x) - a(y)| over pairs with x, y, x+y in the interval."""
    x, y = _pairs(pairs)
    _check_set(x, y, x + y, *interval, positive=False, what="additive")
    return float(np.max(np.abs(a_fn(x + y) - a_fn(x) - a_fn(y))))


def multiplicative_defect(mu_fn, pairs, interval=(0.0, 1.0)) -> float:
    x, y = _pairs(pairs)
    _check_set(x, y, x * y, *interval, positive=False, what="multiplicative")
    return float(np.max(np.abs(mu_fn(x * y) - mu_fn(x) * mu_fn(y))))


def logarithmic_defect(l_fn, pairs, interval=(0.0, 1.0)) -> float:
    x, y = _pairs(pairs)
    _check_set(x, y, x * y, *interval, positive=True, what="logarithmic")
    return float(np.max(np.abs(l_fn(x * y) - l_fn(x) - l_fn(y))))

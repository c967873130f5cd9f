"""Real functions on the open unit interval, plus seeded sup-norm perturbations.

Every function object is callable on a float or an ndarray and is vectorised.
Use :func:`evaluate` when the domain must be checked; calling an object
directly performs the same checks.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Alpha, as_alpha
from .errors import OutOfDomain, TabulatedExtrapolation

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _check_open(x: np.ndarray) -> None:
    if np.any(~((x > 0.0) & (x < 1.0))):
        bad = x[~((x > 0.0) & (x < 1.0))].ravel()[0]
        raise OutOfDomain(f"x={bad!r} is outside the open interval (0, 1)")


def _ret(out: np.ndarray):
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# noise


class NoiseKind(enum.Enum):
    UNIFORM_IID = "uniform_iid"
    SMOOTH_BUMP = "smooth_bump"


def _splitmix64(z: np.ndarray) -> np.ndarray:
    # arithmetic wraps modulo 2**64 by design
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def hashed_uniform(x, seed: int) -> np.ndarray:
    """Uniform [0, 1) value that is a pure function of the bits of ``x`` and ``seed``."""
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    # +0.0 folds -0.0 onto 0.0 so equal floats hash equally
    bits = (x + 0.0).view(np.uint64)
    key = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    z = _splitmix64(bits ^ key)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    kind: NoiseKind = NoiseKind.UNIFORM_IID
    seed: int = 0

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (eps >= 0.0 and math.isfinite(eps)):
            raise OutOfDomain(f"epsilon must be finite and nonnegative, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise OutOfDomain("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "seed", seed)

    def bump_parameters(self) -> tuple[float, float]:
        """Frequency and phase of the SmoothBump kind, drawn from the seed."""
        rng = np.random.default_rng(self.seed)
        omega = rng.uniform(2.0 * math.pi, 16.0 * math.pi)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        return float(omega), float(phi)

    def noise(self, x):
        """Realised perturbation delta(x); |delta| <= epsilon everywhere."""
        x = np.asarray(x, dtype=float)
        if self.epsilon == 0.0:
            return _ret(np.zeros(x.shape))
        if self.kind is NoiseKind.UNIFORM_IID:
            u = hashed_uniform(x, self.seed).reshape(x.shape)
            out = self.epsilon * (2.0 * u - 1.0)
        else:
            omega, phi = self.bump_parameters()
            out = self.epsilon * np.sin(omega * x + phi)
        return _ret(out)


# ---------------------------------------------------------------------------
# function families


@dataclass(frozen=True)
class PowerForm:
    """x -> a x^alpha + b (1-x)^alpha - b."""

    a: float
    b: float
    alpha: Alpha

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_open(x)
        al = self.alpha.value
        return _ret(self.a * x**al + self.b * (1.0 - x) ** al - self.b)

    def pair(self, x, xbar):
        """Value at x given the complement 1-x computed more accurately by the caller."""
        x, xbar = np.asarray(x, dtype=float), np.asarray(xbar, dtype=float)
        _check_open(x)
        al = self.alpha.value
        return _ret(self.a * x**al + self.b * xbar**al - self.b)


@dataclass(frozen=True)
class LogForm:
    """x -> lam * ln(1-x) + c."""

    lam: float
    c: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_open(x)
        return _ret(self.lam * np.log1p(-x) + self.c)

    def pair(self, x, xbar):
        x, xbar = np.asarray(x, dtype=float), np.asarray(xbar, dtype=float)
        _check_open(x)
        return _ret(self.lam * np.log(xbar) + self.c)


@dataclass(frozen=True)
class Tabulated:
    grid: tuple
    values: tuple

    def __init__(self, grid, values):
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape:
            raise OutOfDomain("grid and values must be 1-D and of equal length")
        if g.size < 2:
            raise OutOfDomain("a tabulated function needs at least two samples")
        if not (g[0] > 0.0 and g[-1] < 1.0):
            raise OutOfDomain("tabulated abscissae must lie in the open interval (0, 1)")
        if np.any(np.diff(g) <= 0.0):
            raise OutOfDomain("tabulated abscissae must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise OutOfDomain("tabulated values must be finite")
        object.__setattr__(self, "grid", tuple(g.tolist()))
        object.__setattr__(self, "values", tuple(v.tolist()))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_open(x)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any((x < lo) | (x > hi)):
            raise TabulatedExtrapolation(f"x outside the tabulated hull [{lo}, {hi}]")
        return _ret(np.interp(x, self.grid, self.values))

    @classmethod
    def sample(cls, f, grid) -> "Tabulated":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(f(grid), dtype=float))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for x, v in zip(self.grid, self.values):
                w.writerow([repr(x), repr(v)])

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        with open(Path(path), newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or [h.strip() for h in rows[0]] != ["x", "value"]:
            raise OutOfDomain(f"{path}: expected header 'x,value'")
        body = [r for r in rows[1:] if r]
        return cls([float(r[0]) for r in body], [float(r[1]) for r in body])


@dataclass(frozen=True)
class Perturbed:
    base: object
    noise: PerturbationSpec

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _ret(np.asarray(self.base(x)) + np.asarray(self.noise.noise(x)))

    def pair(self, x, xbar):
        x = np.asarray(x, dtype=float)
        return _ret(np.asarray(evaluate_pair(self.base, x, xbar)) + np.asarray(self.noise.noise(x)))


@dataclass(frozen=True)
class Callable01:
    """Wraps an arbitrary vectorised callable as a function on (0, 1)."""

    fn: object
    name: str = "callable"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_open(x)
        return _ret(np.asarray(self.fn(x), dtype=float) + np.zeros(x.shape))


@dataclass(frozen=True)
class ClosedFunction:
    """A function on [0, 1]: an interior function plus explicit endpoint values."""

    interior: object
    at_zero: float
    at_one: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > 1.0)):
            raise OutOfDomain("closed-domain functions live on [0, 1]")
        inner = (x > 0.0) & (x < 1.0)
        vals = np.asarray(self.interior(np.where(inner, x, 0.5)), dtype=float)
        vals = np.where(x == 0.0, self.at_zero, vals)
        vals = np.where(x == 1.0, self.at_one, vals)
        return _ret(vals)


UnitIntervalFunction = PowerForm | LogForm | Tabulated | Perturbed | Callable01


def evaluate_pair(f, x, xbar):
    """f(x) using a caller-supplied complement xbar = 1-x when f can take one."""
    pair = getattr(f, "pair", None)
    return pair(x, xbar) if pair is not None else f(x)


def evaluate(f, x):
    """Evaluate ``f`` at points of (0, 1); raises OutOfDomain outside it."""
    x = np.asarray(x, dtype=float)
    _check_open(x)
    return f(x)

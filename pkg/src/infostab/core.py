"""Shared domain types and the explicit stability constants K(alpha), T(alpha).

K(alpha) is the three-branch constant of the open-domain stability bound;
T(alpha) is the auxiliary constant for 1 != alpha > 0 used on the closed domain.
Both satisfy, for alpha > 0, alpha != 1::

    K(alpha) = (4 T(alpha) + 3) / |2**(1 - alpha) - 1|
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlphaNearOne, OutOfDomain, TAlphaUndefined

ALPHA_GUARD = 1e-3
ZERO_TOL = 1e-12


class AlphaClass(enum.Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE_NOT_ONE = "positive_not_one"


@dataclass(frozen=True)
class Alpha:
    """The exponent of the parametric equation, guarded away from 1."""

    value: float
    guard: float = ALPHA_GUARD
    zero_tol: float = ZERO_TOL

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise OutOfDomain(f"alpha must be finite, got {self.value!r}")
        if abs(v - 1.0) < self.guard:
            raise AlphaNearOne(
                f"alpha={v} lies within {self.guard} of 1; the stability constant is unbounded there"
            )
        object.__setattr__(self, "value", v)

    @property
    def cls(self) -> AlphaClass:
        if self.value < -self.zero_tol:
            return AlphaClass.NEGATIVE
        if self.value > self.zero_tol:
            return AlphaClass.POSITIVE_NOT_ONE
        return AlphaClass.ZERO

    @property
    def is_zero(self) -> bool:
        return self.cls is AlphaClass.ZERO

    def __float__(self):
        return self.value


def as_alpha(alpha, guard: float = ALPHA_GUARD) -> Alpha:
    if isinstance(alpha, Alpha):
        return alpha
    return Alpha(float(alpha), guard=guard)


def _one_minus_pow2(alpha: float) -> float:
    d = abs(2.0 ** (1.0 - alpha) - 1.0)
    if d == 0.0:
        raise AlphaNearOne("alpha == 1 reached k_alpha; the guard was bypassed")
    return d


def k_alpha(alpha) -> float:
    """Stability constant K(alpha) of the open-domain bound."""
    alpha = as_alpha(alpha)
    a = alpha.value
    cls = alpha.cls
    if cls is AlphaClass.ZERO:
        return 63.0
    d = _one_minus_pow2(a)
    if cls is AlphaClass.NEGATIVE:
        return (8.0 + 6.0 * 2.0**a + 2.0 ** (-a)) / d
    return (3.0 + 12.0 * 2.0**a + 32.0 * 3.0 ** (a + 1.0) / abs(2.0 ** (-a) - 1.0)) / d


def t_alpha(alpha) -> float:
    """T(alpha) = 3*2**alpha + 8*3**(alpha+1)/|2**-alpha - 1|, defined for alpha > 0 only."""
    alpha = as_alpha(alpha)
    if alpha.cls is not AlphaClass.POSITIVE_NOT_ONE:
        raise TAlphaUndefined(f"T(alpha) is defined only for 1 != alpha > 0, got {alpha.value}")
    a = alpha.value
    return 3.0 * 2.0**a + 8.0 * 3.0 ** (a + 1.0) / abs(2.0 ** (-a) - 1.0)


def closed_bound_constant(alpha) -> float:
    """Multiplier of eps on the closed domain: max{K, T+1} for alpha > 0, else K."""
    alpha = as_alpha(alpha)
    if alpha.cls is AlphaClass.POSITIVE_NOT_ONE:
        return max(k_alpha(alpha), t_alpha(alpha) + 1.0)
    return k_alpha(alpha)


@dataclass(frozen=True)
class ProbabilityVector:
    components: tuple

    def __init__(self, components: Sequence[float]):
        p = tuple(float(c) for c in components)
        if len(p) < 2:
            raise OutOfDomain("a probability vector needs at least two components")
        if any(not (c > 0.0) or not math.isfinite(c) for c in p):
            raise OutOfDomain(f"all components must be positive and finite: {p}")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise OutOfDomain(f"components must sum to 1 (sum={math.fsum(p)!r})")
        object.__setattr__(self, "components", p)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)


# ---------------------------------------------------------------------------
# solutions on the closed interval [0, 1]


@dataclass(frozen=True)
class H1:
    """a x^alpha + b (1-x)^alpha - b inside, 0 at x=0 and a-b at x=1."""

    a: float
    b: float
    alpha: Alpha

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > 1.0)):
            raise OutOfDomain("closed solutions live on [0, 1]")
        al = self.alpha.value
        inner = (x > 0.0) & (x < 1.0)
        xs = np.where(inner, x, 0.5)
        out = self.a * xs**al + self.b * (1.0 - xs) ** al - self.b
        out = np.where(x == 0.0, 0.0, out)
        out = np.where(x == 1.0, self.a - self.b, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class H2:
    """Constant c inside, f(0) and f(1) copied at the endpoints."""

    c: float
    f0: float
    f1: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > 1.0)):
            raise OutOfDomain("closed solutions live on [0, 1]")
        out = np.full(x.shape, float(self.c))
        out = np.where(x == 0.0, self.f0, out)
        out = np.where(x == 1.0, self.f1, out)
        return out if out.ndim else float(out)


ClosedSolution = H1 | H2

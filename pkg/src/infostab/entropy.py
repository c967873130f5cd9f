"""Shannon and degree-alpha entropies, alpha-recursive measures, system bounds.

A two-symbol measure is stored as the function f(x) = I2(1-x, x) on (0, 1).
The alpha-recursive extension folds the first two masses together::

    I_n(p1, ..., pn) = I_{n-1}(p1+p2, p3, ..., pn) + (p1+p2)^alpha I2(p1/(p1+p2), p2/(p1+p2))

which unrolls to  I_n(p) = sum_{k=2..n} P_k^alpha f(p_k / P_k),  P_k = p1 + ... + pk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import stability
from .core import AlphaClass, ProbabilityVector, as_alpha, k_alpha
from .equation import OpenTriangleSampler
from .errors import InsufficientSlackSequence, OutOfDomain
from .functions import PowerForm, evaluate_pair

SIMPLEX_MARGIN = 1e-4


def _vectors(p) -> np.ndarray:
    if isinstance(p, ProbabilityVector):
        return p.as_array()[None, :]
    P = np.asarray(p, dtype=float)
    return P[None, :] if P.ndim == 1 else P


def shannon(p) -> float | np.ndarray:
    """Shannon entropy in bits; accepts one vector or an (N, n) batch."""
    P = _vectors(p)
    out = -np.sum(P * np.log2(P), axis=1)
    return float(out[0]) if out.size == 1 and np.ndim(p) <= 1 else out


def degree_alpha(p, alpha) -> float | np.ndarray:
    """(2^(1-alpha) - 1)^-1 (sum p_i^alpha - 1)."""
    al = as_alpha(alpha).value
    P = _vectors(p)
    out = (np.sum(P**al, axis=1) - 1.0) / (2.0 ** (1.0 - al) - 1.0)
    return float(out[0]) if out.size == 1 and np.ndim(p) <= 1 else out


def two_symbol_degree_alpha(alpha) -> PowerForm:
    """x -> H^alpha_2(1-x, x) written in the power family (a = b)."""
    alpha = as_alpha(alpha)
    a = 1.0 / (2.0 ** (1.0 - alpha.value) - 1.0)
    return PowerForm(a, a, alpha)


def recursive_build(i2, alpha, p) -> float | np.ndarray:
    """Evaluate the alpha-recursive measure generated by ``i2`` (as f) at p."""
    al = as_alpha(alpha).value
    P = _vectors(p)
    n = P.shape[1]
    if n < 2:
        raise OutOfDomain("need at least two masses")
    merged = P[:, 0].copy()
    acc = np.zeros(P.shape[0])
    for k in range(1, n):
        if k == n - 1:
            # base case I2(P_{n-1}, p_n) = f(p_n)
            acc = acc + np.asarray(evaluate_pair(i2, P[:, k], merged), dtype=float)
            break
        total = merged + P[:, k]
        if np.any(total >= 1.0 - 1e-15):
            raise OutOfDomain("a merged mass reached 1")
        ratio = P[:, k] / total
        if np.any((ratio <= 0.0) | (ratio >= 1.0)):
            raise OutOfDomain("a two-symbol argument left (0, 1)")
        # merged/total is the complement of ratio without cancellation
        acc = acc + total**al * np.asarray(evaluate_pair(i2, ratio, merged / total), dtype=float)
        merged = total
    return float(acc[0]) if acc.size == 1 and np.ndim(p) <= 1 else acc


def semi_symmetry_defect(i3, triples) -> float:
    """max |I3(p1,p2,p3) - I3(p1,p3,p2)| over the (N, 3) sample."""
    T = np.asarray(triples, dtype=float)
    swapped = T[:, [0, 2, 1]]
    return float(np.max(np.abs(np.asarray(i3(T)) - np.asarray(i3(swapped)))))


def simplex_sample(n: int, count: int, seed: int, margin: float = SIMPLEX_MARGIN) -> np.ndarray:
    """Seeded uniform draws on the open simplex with every coordinate >= margin."""
    rng = np.random.default_rng(seed)
    rows, got = [], 0
    while got < count:
        E = rng.exponential(size=(max(2 * count, 256), n))
        S = E / E.sum(axis=1, keepdims=True)
        S = S[np.all(S >= margin, axis=1)]
        rows.append(S)
        got += S.shape[0]
    return np.concatenate(rows)[:count]


@dataclass(frozen=True)
class MeasureSystem:
    i2: object
    alpha: object
    slack: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        s = tuple(float(e) for e in self.slack)
        if any(not (e >= 0.0) for e in s):
            raise OutOfDomain("slack entries must be nonnegative")
        object.__setattr__(self, "slack", s)

    def measure(self, p):
        return recursive_build(self.i2, self.alpha, p)


def reduce_to_f(system: MeasureSystem):
    """f(x) = I2(1-x, x); the two-symbol measure is already stored this way."""
    return system.i2


def measured_slack(i2, alpha, n_max: int, sampler: OpenTriangleSampler | None = None,
                   count: int = 2_000, seed: int = 0) -> tuple:
    """Slack sequence (eps_1, ..., eps_{n_max-1}) measured on a recursively built system.

    eps_1 is the 3-semi-symmetry defect over triples (1-x-y, y, x) drawn from
    the triangle sampler; eps_k (k >= 2) is the recursion defect at level k+1.
    """
    alpha = as_alpha(alpha)
    sampler = sampler or OpenTriangleSampler()
    x, y = sampler.points()
    triples = np.column_stack([1.0 - x - y, y, x])
    eps1 = semi_symmetry_defect(lambda T: recursive_build(i2, alpha, T), triples)
    out = [eps1]
    for level in range(3, max(n_max, 3) + 1):
        P = simplex_sample(level, count, seed + level)
        merged = np.column_stack([P[:, 0] + P[:, 1], P[:, 2:]])
        direct = recursive_build(i2, alpha, P)
        head = P[:, 0] + P[:, 1]
        folded = recursive_build(i2, alpha, merged) + head**alpha.value * np.asarray(
            evaluate_pair(i2, P[:, 1] / head, P[:, 0] / head)
        )
        out.append(float(np.max(np.abs(direct - folded))))
    return tuple(out[: max(n_max - 1, 2)])


@dataclass(frozen=True)
class LevelReport:
    n: int
    deviation: float
    bound: float
    bound_min: float
    bound_max: float
    utilization: float
    passed: bool
    scale: float = 0.0  # max |J_n| over the sample: the floating-point floor is relative to it

    def to_dict(self):
        return {
            "n": self.n,
            "deviation": self.deviation,
            "bound": self.bound,
            "bound_min": self.bound_min,
            "bound_max": self.bound_max,
            "utilization": self.utilization,
            "pass": self.passed,
            "scale": self.scale,
        }


@dataclass(frozen=True)
class SystemCertificate:
    alpha: float
    candidate: object
    c: float
    d: float
    levels: tuple
    note: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.levels)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "candidate": self.candidate.to_dict(),
            "c": self.c,
            "d": self.d,
            "levels": [r.to_dict() for r in self.levels],
            "pass": self.passed,
            "note": self.note,
        }


J_FORM_NOTE = (
    "J_n = c H^alpha_n + d (p1^alpha - 1) for alpha != 0, the alpha-recursive "
    "extension of the candidate; the d term vanishes only when a = b"
)


def comparison_measure(candidate, alpha, P):
    """J_n built from an extracted candidate, evaluated on an (N, n) batch."""
    alpha = as_alpha(alpha)
    al = alpha.value
    n = P.shape[1]
    if alpha.is_zero:
        return candidate.c * (n - 1) + candidate.lam * np.log(P[:, 0])
    c = (2.0 ** (1.0 - al) - 1.0) * candidate.a
    d = candidate.b - candidate.a
    return c * degree_alpha(P, alpha) + d * (P[:, 0] ** al - 1.0)


def system_bound(alpha, slack, n: int, P: np.ndarray) -> np.ndarray:
    """Right-hand side of the system stability inequality, per sampled vector."""
    alpha = as_alpha(alpha)
    al = alpha.value
    eps1, eps2 = slack[0], slack[1]
    prefix = math.fsum(slack[1 : n - 1])  # eps_2 + ... + eps_{n-1}
    core = k_alpha(alpha) * (2.0 * eps2 + eps1)
    if alpha.cls is AlphaClass.NEGATIVE:
        factor = np.ones(P.shape[0])
        partial = np.cumsum(P**al, axis=1)  # partial[:, k-1] = sum_{i<=k} p_i^alpha
        for k in range(2, n):
            factor = factor + partial[:, k - 1]
        return prefix + core * factor
    return np.full(P.shape[0], prefix + core * (n - 1))


def system_certificate(system: MeasureSystem, n_max: int, count: int = 10_000,
                       seed: int = 0, margin: float = SIMPLEX_MARGIN) -> SystemCertificate:
    alpha = system.alpha
    if not 2 <= n_max <= 8:
        raise OutOfDomain("n_max must lie in [2, 8]")
    if len(system.slack) < max(2, n_max - 1):
        raise InsufficientSlackSequence(
            f"need eps_1..eps_{max(2, n_max - 1)}, got {len(system.slack)} entries"
        )
    f = reduce_to_f(system)
    cand = stability.extract_candidate(f, alpha)
    if alpha.is_zero:
        c, d = cand.c, 0.0
    else:
        c = (2.0 ** (1.0 - alpha.value) - 1.0) * cand.a
        d = cand.b - cand.a
    levels = []
    for n in range(2, n_max + 1):
        P = simplex_sample(n, count, seed + n, margin)
        J = comparison_measure(cand, alpha, P)
        dev = np.abs(system.measure(P) - J)
        bnd = system_bound(alpha, system.slack, n, P)
        ok = dev <= bnd + stability.VERDICT_SLACK * (1.0 + np.abs(bnd))
        with np.errstate(divide="ignore", invalid="ignore"):
            util = np.where(bnd > 0, dev / bnd, np.where(dev == 0, 0.0, np.inf))
        i = int(np.argmax(util))
        levels.append(
            LevelReport(
                n=n,
                deviation=float(dev.max()),
                bound=float(bnd[i]),
                bound_min=float(bnd.min()),
                bound_max=float(bnd.max()),
                utilization=float(util[i]),
                passed=bool(np.all(ok)),
                scale=float(np.max(np.abs(J))),
            )
        )
    return SystemCertificate(
        alpha=alpha.value, candidate=cand, c=float(c), d=float(d), levels=tuple(levels),
        note="" if alpha.is_zero else J_FORM_NOTE,
    )

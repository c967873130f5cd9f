"""Constructive extraction of the near-solution and certification of the bound.

The homogeneous lift of f is
``F(u, v) = (u+v)^alpha f(v/(u+v))`` and its asymmetry ``g(u) = F(u,1) - F(1,u)``
determines the antisymmetric part of the candidate:

* alpha != 0: g(u) ~ c (u^alpha - 1).  c is read off at u = 2 (alpha < 0) or
  u = 1/2 (alpha > 0); both need only f(1/3) and f(2/3).  Centering
  f0(x) = f(x) - c[(1-x)^alpha - 1] leaves a nearly symmetric solution whose
  value at 1/2 fixes a = f0(1/2) / (2^(1-alpha) - 1), and b = a + c.
* alpha == 0: g is nearly logarithmic, g(u) ~ lam ln u.  lam is the
  least-squares slope of g against ln u; then c = f(1/2) - lam ln(1/2).

A certificate compares the sup deviation |f - candidate| on a dense grid with
K(alpha) times the sampled residual sup eps_hat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AlphaClass,
    H1,
    H2,
    as_alpha,
    closed_bound_constant,
    k_alpha,
    t_alpha,
)
from .equation import OpenTriangleSampler, sup_residual
from .errors import CaseMismatch, DegenerateGrid, NonFiniteValue, ZeroAlphaHasNoC

VERDICT_SLACK = 1e-9
DEFAULT_DEVIATION_POINTS = 10_000


# ---------------------------------------------------------------------------
# candidate solutions


@dataclass(frozen=True)
class Power:
    a: float
    b: float

    kind = "power"

    def evaluate(self, x, alpha):
        al = as_alpha(alpha).value
        x = np.asarray(x, dtype=float)
        return self.a * x**al + self.b * (1.0 - x) ** al - self.b

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class LogPlusConst:
    lam: float
    c: float

    kind = "log_plus_const"

    def evaluate(self, x, alpha=0.0):
        x = np.asarray(x, dtype=float)
        return self.lam * np.log1p(-x) + self.c

    def to_dict(self):
        return {"kind": self.kind, "lambda": self.lam, "c": self.c}


CanonicalSolution = Power | LogPlusConst


def candidate_from_dict(d) -> CanonicalSolution:
    if d["kind"] == Power.kind:
        return Power(float(d["a"]), float(d["b"]))
    if d["kind"] == LogPlusConst.kind:
        return LogPlusConst(float(d["lambda"]), float(d["c"]))
    raise ValueError(f"unknown candidate kind {d['kind']!r}")


def _finite(value, what):
    v = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue(f"non-finite {what}")
    return value


# ---------------------------------------------------------------------------
# lift and defect


def lift_F(f, alpha, u, v):
    """Homogeneous lift F(u, v) = (u+v)^alpha f(v/(u+v)) on the positive quadrant."""
    al = as_alpha(alpha).value
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    s = u + v
    with np.errstate(over="ignore", invalid="ignore"):
        out = s**al * f(v / s)
    return _finite(out, "lift F")


def defect_g(f, alpha, u):
    """g(u) = F(u,1) - F(1,u) = (1+u)^alpha [f(1/(1+u)) - f(u/(1+u))]."""
    al = as_alpha(alpha).value
    u = np.asarray(u, dtype=float)
    s = 1.0 + u
    with np.errstate(over="ignore", invalid="ignore"):
        out = s**al * (f(1.0 / s) - f(u / s))
    return _finite(out, "defect g")


def extract_c(f, alpha) -> float:
    alpha = as_alpha(alpha)
    al = alpha.value
    if alpha.cls is AlphaClass.NEGATIVE:
        return float(defect_g(f, alpha, 2.0)) / (2.0**al - 1.0)
    if alpha.cls is AlphaClass.POSITIVE_NOT_ONE:
        return float(defect_g(f, alpha, 0.5)) / (2.0 ** (-al) - 1.0)
    raise ZeroAlphaHasNoC("the antisymmetric coefficient c is undefined for alpha = 0")


def c_amplification(alpha) -> float:
    """Worst-case |c error| per unit sup-norm perturbation of f."""
    alpha = as_alpha(alpha)
    al = alpha.value
    if alpha.cls is AlphaClass.NEGATIVE:
        return 2.0 * 3.0**al / abs(2.0**al - 1.0)
    if alpha.cls is AlphaClass.POSITIVE_NOT_ONE:
        return 2.0 * 1.5**al / abs(2.0 ** (-al) - 1.0)
    raise ZeroAlphaHasNoC("no c for alpha = 0")


def default_u_grid(points: int = 64) -> np.ndarray:
    return np.geomspace(1.0 / 8.0, 8.0, points)


@dataclass(frozen=True)
class LogFit:
    lam: float
    log_defect: float


def fit_lambda_log(f, u_grid=None) -> LogFit:
    """Fit g(u) ~ lam ln u at alpha = 0 and measure how logarithmic g is."""
    u = default_u_grid() if u_grid is None else np.asarray(u_grid, dtype=float)
    if u.ndim != 1 or u.size < 8 or np.any(u <= 0.0) or np.unique(u).size < 8:
        raise DegenerateGrid("need at least 8 distinct positive grid points")
    lu = np.log(u)
    denom = float(np.dot(lu, lu))
    if denom == 0.0:
        raise DegenerateGrid("grid collapses onto u = 1")
    g = np.asarray(defect_g(f, 0.0, u), dtype=float)
    lam = float(np.dot(g, lu) / denom)
    lo, hi = u.min(), u.max()
    uu, vv = np.meshgrid(u, u, indexing="ij")
    prod = uu * vv
    inside = (prod >= lo) & (prod <= hi)
    if not np.any(inside):
        defect = 0.0
    else:
        gu = np.broadcast_to(g[:, None], uu.shape)[inside]
        gv = np.broadcast_to(g[None, :], vv.shape)[inside]
        guv = np.asarray(defect_g(f, 0.0, prod[inside]), dtype=float)
        defect = float(np.max(np.abs(guv - gu - gv)))
    return LogFit(lam=lam, log_defect=defect)


def centered(f, alpha, c):
    """f0(x) = f(x) - c[(1-x)^alpha - 1]; removes the exact antisymmetric solution."""
    al = as_alpha(alpha).value

    def f0(x):
        x = np.asarray(x, dtype=float)
        return f(x) - c * ((1.0 - x) ** al - 1.0)

    return f0


def extract_candidate(f, alpha, u_grid=None) -> CanonicalSolution:
    alpha = as_alpha(alpha)
    if alpha.is_zero:
        lam = fit_lambda_log(f, u_grid).lam
        c = float(f(0.5)) - lam * math.log(0.5)
        return LogPlusConst(lam=lam, c=c)
    al = alpha.value
    c = extract_c(f, alpha)
    a = float(centered(f, alpha, c)(0.5)) / (2.0 ** (1.0 - al) - 1.0)
    return Power(a=a, b=a + c)


def uncorrected_centering_candidate(f, alpha) -> Power:
    """Variant that centers with f(x) - c(1-x)^alpha (no +c), for comparison only."""
    alpha = as_alpha(alpha)
    al = alpha.value
    c = extract_c(f, alpha)
    f0_half = float(f(0.5)) - c * 0.5**al
    a = f0_half / (2.0 ** (1.0 - al) - 1.0)
    return Power(a=a, b=a + c)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class StabilityCertificate:
    alpha: float
    eps_hat: float
    k_alpha: float
    candidate: CanonicalSolution
    sup_deviation: float
    bound: float
    passed: bool
    samples: int
    margin: float
    seed: int
    domain: str
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail at sampled resolution"

    @property
    def utilization(self) -> float:
        if self.bound > 0.0:
            return self.sup_deviation / self.bound
        return 0.0 if self.sup_deviation == 0.0 else math.inf

    def to_dict(self) -> dict:
        """JSON form: exactly the certificate fields, snake_case keys."""
        return {
            "alpha": self.alpha,
            "eps_hat": self.eps_hat,
            "k_alpha": self.k_alpha,
            "candidate": self.candidate.to_dict(),
            "sup_deviation": self.sup_deviation,
            "bound": self.bound,
            "pass": self.passed,
            "samples": self.samples,
            "margin": self.margin,
            "seed": self.seed,
            "domain": self.domain,
        }

    @classmethod
    def from_dict(cls, d) -> "StabilityCertificate":
        return cls(
            alpha=float(d["alpha"]),
            eps_hat=float(d["eps_hat"]),
            k_alpha=float(d["k_alpha"]),
            candidate=candidate_from_dict(d["candidate"]),
            sup_deviation=float(d["sup_deviation"]),
            bound=float(d["bound"]),
            passed=bool(d["pass"]),
            samples=int(d["samples"]),
            margin=float(d["margin"]),
            seed=int(d["seed"]),
            domain=str(d["domain"]),
        )


def verdict(sup_deviation: float, bound: float) -> bool:
    return sup_deviation <= bound + VERDICT_SLACK * (1.0 + abs(bound))


def deviation_grid(margin: float, points: int = DEFAULT_DEVIATION_POINTS) -> np.ndarray:
    return np.linspace(margin, 1.0 - margin, int(points))


def _sup_deviation(f, candidate, alpha, xs):
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.abs(np.asarray(f(xs), dtype=float) - candidate.evaluate(xs, alpha))
    _finite(d, "deviation")
    i = int(np.argmax(d))
    return float(d[i]), float(xs[i])


def certify_open(
    f,
    alpha,
    sampler: OpenTriangleSampler | None = None,
    deviation_points: int = DEFAULT_DEVIATION_POINTS,
) -> StabilityCertificate:
    alpha = as_alpha(alpha)
    sampler = sampler or OpenTriangleSampler()
    res = sup_residual(f, alpha, sampler)
    cand = extract_candidate(f, alpha)
    xs = deviation_grid(sampler.margin, deviation_points)
    dev, at = _sup_deviation(f, cand, alpha, xs)
    k = k_alpha(alpha)
    bound = k * res.eps_hat
    diag = {
        "p99": res.p99,
        "argmax": list(res.argmax),
        "deviation_argmax": at,
        "deviation_points": int(deviation_points),
        "scheme": sampler.scheme.value,
    }
    if not alpha.is_zero:
        diag["c_amplification"] = c_amplification(alpha)
        if alpha.cls is AlphaClass.POSITIVE_NOT_ONE:
            diag["uncorrected_centering_deviation"] = _sup_deviation(
                f, uncorrected_centering_candidate(f, alpha), alpha, xs
            )[0]
    passed = verdict(dev, bound)
    diag["verdict"] = "pass" if passed else "fail at sampled resolution"
    return StabilityCertificate(
        alpha=alpha.value,
        eps_hat=res.eps_hat,
        k_alpha=k,
        candidate=cand,
        sup_deviation=dev,
        bound=bound,
        passed=passed,
        samples=res.samples,
        margin=sampler.margin,
        seed=sampler.seed,
        domain="open",
        diagnostics=diag,
    )


def extend_closed(candidate, alpha, f0: float, f1: float):
    """Extend a candidate to [0, 1] with the boundary values of the closed-domain solution."""
    alpha = as_alpha(alpha)
    if alpha.is_zero:
        if not isinstance(candidate, LogPlusConst):
            raise CaseMismatch("alpha = 0 requires a log-plus-constant candidate")
        return H2(c=candidate.c, f0=float(f0), f1=float(f1))
    if not isinstance(candidate, Power):
        raise CaseMismatch("alpha != 0 requires a power candidate")
    return H1(a=candidate.a, b=candidate.b, alpha=alpha)


def _interior(f):
    """Restriction of a [0, 1] function to (0, 1)."""
    return getattr(f, "interior", f)


def closed_boundary_residual(f, alpha, margin: float, points: int = 2_000) -> float:
    """Sup of the residual along the three edges of the closed triangle (diagnostic)."""
    al = as_alpha(alpha).value
    t = np.linspace(margin, 1.0 - margin, points)

    def r(x, y):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            lhs = f(x) + (1.0 - x) ** al * f(np.clip(y / (1.0 - x), 0.0, 1.0))
            rhs = f(y) + (1.0 - y) ** al * f(np.clip(x / (1.0 - y), 0.0, 1.0))
        return np.abs(lhs - rhs)

    zero = np.zeros_like(t)
    vals = np.concatenate([r(t, zero), r(zero, t), r(t, 1.0 - t)])
    vals = vals[np.isfinite(vals)]
    return float(vals.max()) if vals.size else math.nan


def certify_closed(
    f,
    alpha,
    sampler: OpenTriangleSampler | None = None,
    deviation_points: int = DEFAULT_DEVIATION_POINTS,
) -> StabilityCertificate:
    """Certify a function on [0, 1] against the closed-domain solution.

    eps_hat is measured on the open triangle; the deviation sup includes both
    endpoints.  The boundary-edge residual is reported as a diagnostic only.
    """
    alpha = as_alpha(alpha)
    sampler = sampler or OpenTriangleSampler()
    inner = _interior(f)
    res = sup_residual(inner, alpha, sampler)
    cand = extract_candidate(inner, alpha)
    f0 = float(f(0.0))
    f1 = float(f(1.0))
    h = extend_closed(cand, alpha, f0, f1)
    xs = np.concatenate([[0.0], deviation_grid(sampler.margin, deviation_points), [1.0]])
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.abs(np.asarray(f(xs), dtype=float) - h(xs))
    _finite(d, "deviation")
    i = int(np.argmax(d))
    dev = float(d[i])
    k = k_alpha(alpha)
    bound = closed_bound_constant(alpha) * res.eps_hat
    passed = verdict(dev, bound)
    diag = {
        "p99": res.p99,
        "argmax": list(res.argmax),
        "deviation_argmax": float(xs[i]),
        "endpoint_deviation": [float(d[0]), float(d[-1])],
        "boundary_residual": closed_boundary_residual(f, alpha, sampler.margin),
        "bound_constant": closed_bound_constant(alpha),
        "verdict": "pass" if passed else "fail at sampled resolution",
    }
    if alpha.cls is AlphaClass.POSITIVE_NOT_ONE:
        diag["t_alpha"] = t_alpha(alpha)
    return StabilityCertificate(
        alpha=alpha.value,
        eps_hat=res.eps_hat,
        k_alpha=k,
        candidate=cand,
        sup_deviation=dev,
        bound=bound,
        passed=passed,
        samples=res.samples,
        margin=sampler.margin,
        seed=sampler.seed,
        domain="closed",
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# intermediate quantities


@dataclass(frozen=True)
class ProofDiagnostics:
    F0: float
    G_defect: float


def F0_value(f, alpha, p, q, c=None):
    """F0(p, q) = f0(p) + p^a f0(q) - f0(pq) - (1-pq)^a f0((1-p)/(1-pq)), vectorised."""
    alpha = as_alpha(alpha)
    al = alpha.value
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if alpha.is_zero:
        lam = fit_lambda_log(f).lam

        def f0(x):
            return f(x) - lam * np.log1p(-np.asarray(x, dtype=float))
    else:
        f0 = centered(f, alpha, extract_c(f, alpha) if c is None else c)
    pq = p * q
    with np.errstate(over="ignore", invalid="ignore"):
        out = f0(p) + p**al * f0(q) - f0(pq) - (1.0 - pq) ** al * f0((1.0 - p) / (1.0 - pq))
    return _finite(out, "F0")


def G_defect_value(f, alpha, u, v):
    """|G(u,v) - G(v,u)| with G(u,v) = F(u,v) + g(v)."""
    G_uv = lift_F(f, alpha, u, v) + defect_g(f, alpha, v)
    G_vu = lift_F(f, alpha, v, u) + defect_g(f, alpha, u)
    return np.abs(G_uv - G_vu)


def proof_diagnostics(f, alpha, p: float, q: float) -> ProofDiagnostics:
    return ProofDiagnostics(
        F0=float(F0_value(f, alpha, p, q)),
        G_defect=float(G_defect_value(f, alpha, p, q)),
    )


def certificate_json(cert: StabilityCertificate) -> dict:
    return cert.to_dict()


__all__ = [
    "Power",
    "LogPlusConst",
    "CanonicalSolution",
    "StabilityCertificate",
    "ProofDiagnostics",
    "LogFit",
    "lift_F",
    "defect_g",
    "extract_c",
    "fit_lambda_log",
    "centered",
    "extract_candidate",
    "uncorrected_centering_candidate",
    "certify_open",
    "certify_closed",
    "extend_closed",
    "proof_diagnostics",
    "F0_value",
    "G_defect_value",
    "verdict",
]

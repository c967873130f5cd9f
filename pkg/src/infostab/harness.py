"""Instance generation, constant sweeps and batch experiments.

An experiment is described by a flat ``key = value`` file (TOML syntax, no
tables).  Every key has a CLI flag of the same name with dashes; flags
override file values.  Reports are deterministic JSON: identical configs give
byte-identical report files.  Wall-clock metadata goes to a sidecar file.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle, stability
from .core import AlphaClass, as_alpha, k_alpha, t_alpha
from .equation import OpenTriangleSampler, SamplerScheme
from .errors import AlphaNearOne, ConfigError
from .functions import ClosedFunction, LogForm, NoiseKind, PerturbationSpec, Perturbed, PowerForm, Tabulated

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FAMILIES = ("power", "log")
DOMAINS = ("open", "closed", "both")
ORACLE_STRIDE = 5  # oracle grid = every 5th deviation-grid point


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float
    family: str = ""
    a: float = 0.0
    b: float = 0.0
    lam: float = 0.0
    c: float = 0.0
    epsilon: float = 0.0
    noise_kind: str = NoiseKind.UNIFORM_IID.value
    noise_seed: int = 0
    samples: int = 20_000
    margin: float = 1e-4
    seed: int = 0
    scheme: str = SamplerScheme.HALTON.value
    deviation_points: int = 10_000
    domain: str = "open"
    f0: float | None = None
    f1: float | None = None
    oracle: bool = True
    table_points: int = 0
    manifest_path: str = ""
    table_path: str = ""

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        for name in ("alpha", "a", "b", "lam", "c", "epsilon", "margin"):
            set_(name, _as_float(name, getattr(self, name)))
        for name in ("f0", "f1"):
            if getattr(self, name) is not None:
                set_(name, _as_float(name, getattr(self, name)))
        for name in ("noise_seed", "samples", "seed", "deviation_points", "table_points"):
            set_(name, _as_int(name, getattr(self, name)))
        try:
            alpha = as_alpha(self.alpha)
        except AlphaNearOne as exc:
            raise ConfigError("alpha", str(exc)) from exc
        family = self.family or ("log" if alpha.is_zero else "power")
        if family not in FAMILIES:
            raise ConfigError("family", f"expected one of {FAMILIES}, got {family!r}")
        if (family == "log") != alpha.is_zero:
            raise ConfigError("family", "the log family goes with alpha = 0, the power family otherwise")
        set_("family", family)
        if not self.epsilon >= 0.0:
            raise ConfigError("epsilon", "must be nonnegative")
        _choice("noise_kind", self.noise_kind, [k.value for k in NoiseKind])
        _choice("scheme", self.scheme, [s.value for s in SamplerScheme])
        _choice("domain", self.domain, DOMAINS)
        if not 0 <= self.noise_seed < 2**64:
            raise ConfigError("noise_seed", "must be a 64-bit unsigned integer")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if self.samples < 1:
            raise ConfigError("samples", "must be positive")
        if not 0.0 < self.margin < 0.25:
            raise ConfigError("margin", "must lie in (0, 0.25)")
        if self.deviation_points < 2:
            raise ConfigError("deviation_points", "need at least two points")
        if self.table_points < 0 or self.table_points == 1:
            raise ConfigError("table_points", "must be 0 (no dump) or at least 2")
        if not isinstance(self.oracle, bool):
            raise ConfigError("oracle", "must be true or false")
        for name in ("manifest_path", "table_path"):
            if not isinstance(getattr(self, name), str):
                raise ConfigError(name, "must be a string")

    # -- file form ---------------------------------------------------------

    @classmethod
    def from_mapping(cls, data) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration key")
        if "alpha" not in data:
            raise ConfigError("alpha", "required")
        return cls(**dict(data))

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("<file>", f"not a flat key = value file: {exc}") from exc
        for key, value in data.items():
            if isinstance(value, (dict, list)):
                raise ConfigError(key, "nested values are not allowed")
        return cls.from_mapping(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_toml_value(value)}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    # -- derived objects ---------------------------------------------------

    def sampler(self) -> OpenTriangleSampler:
        return OpenTriangleSampler(
            count=self.samples, margin=self.margin, seed=self.seed, scheme=SamplerScheme(self.scheme)
        )

    def perturbation(self) -> PerturbationSpec:
        return PerturbationSpec(self.epsilon, NoiseKind(self.noise_kind), self.noise_seed)

    def truth(self) -> dict:
        if self.family == "power":
            return {"kind": "power", "a": self.a, "b": self.b}
        return {"kind": "log_plus_const", "lambda": self.lam, "c": self.c}


def _as_float(name, value) -> float:
    if isinstance(value, bool):
        raise ConfigError(name, "expected a real number")
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"expected a real number, got {value!r}") from exc
    if not math.isfinite(out):
        raise ConfigError(name, "must be finite")
    return out


def _as_int(name, value) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"expected an integer, got {value!r}") from exc


def _choice(name, value, allowed):
    if value not in allowed:
        raise ConfigError(name, f"expected one of {list(allowed)}, got {value!r}")


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # repr round-trips exactly; TOML needs a fraction or exponent on floats
        text = repr(value)
        return text if any(ch in text for ch in ".eEn") else text + ".0"
    return json.dumps(value)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    config: ExperimentConfig
    function: object  # the perturbed function on (0, 1)
    closed: ClosedFunction
    manifest: dict


def base_function(config: ExperimentConfig):
    if config.family == "power":
        return PowerForm(config.a, config.b, config.alpha)
    return LogForm(config.lam, config.c)


def closed_endpoint_values(config: ExperimentConfig, noise: PerturbationSpec) -> tuple[float, float]:
    """Boundary values consistent with the closed-domain solutions.

    alpha < 0 forces f(0) = 0 exactly and the exact f(1) = a - b; for alpha > 0
    the perturbation reaches the endpoints too.  At alpha = 0 any values are
    consistent; they come from the config (default 0).
    """
    alpha = as_alpha(config.alpha)
    if alpha.is_zero:
        return (config.f0 or 0.0), (config.f1 or 0.0)
    f0 = 0.0 if config.f0 is None else config.f0
    f1 = config.a - config.b if config.f1 is None else config.f1
    if alpha.cls is AlphaClass.POSITIVE_NOT_ONE:
        f0 += float(noise.noise(0.0))
        f1 += float(noise.noise(1.0))
    return f0, f1


def gen_instance(config: ExperimentConfig, write: bool = True) -> Instance:
    """Build the perturbed instance and its manifest; optionally write both to disk."""
    noise = config.perturbation()
    base = base_function(config)
    f = Perturbed(base, noise) if config.epsilon > 0.0 else base
    f0, f1 = closed_endpoint_values(config, noise)
    closed = ClosedFunction(f, f0, f1)
    manifest = {
        "config": json.loads(json.dumps(_config_dict(config))),
        "status": "exact" if config.epsilon == 0.0 else "perturbed",
        "truth": config.truth(),
        "closed_endpoints": [f0, f1],
    }
    if config.family == "power" and config.noise_kind == NoiseKind.SMOOTH_BUMP.value and config.epsilon > 0:
        omega, phi = noise.bump_parameters()
        manifest["bump"] = {"omega": omega, "phi": phi}
    if write and config.manifest_path:
        write_json(config.manifest_path, manifest)
    if write and config.table_path and config.table_points >= 2:
        grid = np.linspace(config.margin, 1.0 - config.margin, config.table_points)
        Tabulated.sample(f, grid).to_csv(config.table_path)
    return Instance(config=config, function=f, closed=closed, manifest=manifest)


def _config_dict(config: ExperimentConfig) -> dict:
    return {f.name: getattr(config, f.name) for f in dataclasses.fields(config)}


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


# ---------------------------------------------------------------------------
# constants


CONSTANT_COLUMNS = ("alpha", "k_alpha", "t_alpha", "relation_residual")


def sweep_constants(alpha_grid) -> tuple[list[dict], dict]:
    """Rows (alpha, K, T, K-T relation residual) and a summary over the negative half."""
    rows = []
    neg_max, neg_arg = -math.inf, math.nan
    for al in np.asarray(alpha_grid, dtype=float):
        al = float(al)
        k = k_alpha(al)
        t = rel = None
        if al > 0.0 and not as_alpha(al).is_zero:
            t = t_alpha(al)
            rel = abs(k - (4.0 * t + 3.0) / abs(2.0 ** (1.0 - al) - 1.0)) / k
        if al < 0.0 and k > neg_max:
            neg_max, neg_arg = k, al
        rows.append({"alpha": al, "k_alpha": k, "t_alpha": t, "relation_residual": rel})
    summary = {
        "points": len(rows),
        "max_k_negative": None if neg_max == -math.inf else neg_max,
        "argmax_k_negative": None if neg_max == -math.inf else neg_arg,
        "max_relation_residual": max(
            (r["relation_residual"] for r in rows if r["relation_residual"] is not None), default=None
        ),
    }
    return rows, summary


def write_constants_csv(rows, path_or_file) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONSTANT_COLUMNS)
        for r in rows:
            w.writerow(["" if r[c] is None else repr(r[c]) for c in CONSTANT_COLUMNS])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


# ---------------------------------------------------------------------------
# batch runs


def worker_limit(default: int | None = None) -> int:
    env = os.environ.get("INFOSTAB_WORKERS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError("INFOSTAB_WORKERS", f"expected an integer, got {env!r}") from exc
        return max(1, n)
    return default or min(4, os.cpu_count() or 1)


def oracle_comparison(f, config: ExperimentConfig, candidate) -> dict | None:
    """Oracle fit on a subset of the deviation grid, with the candidate scored on the same points."""
    xs = stability.deviation_grid(config.margin, config.deviation_points)[::ORACLE_STRIDE]
    if xs.size < oracle.MIN_GRID:
        return None
    alpha = as_alpha(config.alpha)
    cand_dev = float(np.max(np.abs(np.asarray(f(xs)) - candidate.evaluate(xs, alpha))))
    if alpha.is_zero:
        fit = oracle.chebyshev_fit_log(f, xs)
        params = {"lambda": fit.lam, "c": fit.c}
    elif abs(alpha.value) > 0.01:
        fit = oracle.chebyshev_fit_power(f, alpha, xs)
        params = {"a": fit.a, "b": fit.b}
    else:
        return None
    return {
        "grid_points": int(xs.size),
        "oracle": params,
        "oracle_dev": fit.dev,
        "candidate_dev": cand_dev,
        "sandwich_lower": fit.dev <= cand_dev + stability.VERDICT_SLACK * (1.0 + cand_dev),
    }


def score_candidate(candidate, truth: dict) -> float:
    """Largest absolute parameter error of the extracted candidate against the truth."""
    got = candidate.to_dict()
    keys = [k for k in truth if k != "kind"]
    return max(abs(got[k] - truth[k]) for k in keys)


def run_one(config: ExperimentConfig) -> dict:
    inst = gen_instance(config, write=False)
    sampler = config.sampler()
    out = {"status": "ok", "truth": inst.manifest["truth"], "exact": config.epsilon == 0.0}
    certs = {}
    if config.domain in ("open", "both"):
        certs["open"] = stability.certify_open(inst.function, config.alpha, sampler, config.deviation_points)
    if config.domain in ("closed", "both"):
        certs["closed"] = stability.certify_closed(inst.closed, config.alpha, sampler, config.deviation_points)
    out["certificates"] = {k: c.to_dict() for k, c in certs.items()}
    first = next(iter(certs.values()))
    out["parameter_error"] = score_candidate(first.candidate, inst.manifest["truth"])
    out["oracle"] = oracle_comparison(inst.function, config, first.candidate) if config.oracle else None
    out["pass"] = all(c.passed for c in certs.values())
    out["utilization"] = max(c.utilization for c in certs.values())
    return out


def _resolve(item) -> ExperimentConfig:
    if isinstance(item, ExperimentConfig):
        return item
    if isinstance(item, (str, os.PathLike)):
        return ExperimentConfig.load(item)
    return ExperimentConfig.from_mapping(item)


def _run_isolated(index, item) -> dict:
    label = str(item) if isinstance(item, (str, os.PathLike)) else None
    try:
        result = run_one(_resolve(item))
    except Exception as exc:  # one bad config must not sink the batch
        result = {"status": "error", "error": type(exc).__name__, "message": str(exc)}
    result["index"] = index
    if label is not None:
        result["source"] = label
    return result


def run_batch(configs, workers: int | None = None) -> dict:
    """Run every config, isolating failures; the report is ordered by config index."""
    items = list(configs)
    if not items:
        raise ConfigError("configs", "a batch needs at least one config")
    n_workers = workers or worker_limit()
    if n_workers == 1:
        results = [_run_isolated(i, c) for i, c in enumerate(items)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_run_isolated, range(len(items)), items))
    ok = [r for r in results if r["status"] == "ok"]
    passed = sum(r["pass"] for r in ok)
    utils = [r["utilization"] for r in ok]
    summary = {
        "configs": len(results),
        "completed": len(ok),
        "errors": len(results) - len(ok),
        "passed": passed,
        "failed": len(ok) - passed,
        "pass_rate": passed / len(ok) if ok else None,
        "max_utilization": max(utils) if utils else None,
        "max_parameter_error_exact": max(
            (r["parameter_error"] for r in ok if r["exact"]), default=None
        ),
        "oracle_sandwich_ok": all(r["oracle"]["sandwich_lower"] for r in ok if r["oracle"]),
    }
    return {"summary": summary, "results": results}


def write_report(report: dict, path) -> None:
    """Deterministic report file plus a ``.meta.json`` sidecar holding the timestamp."""
    path = Path(path)
    write_json(path, report)
    meta = {"generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), "report": path.name}
    write_json(path.with_suffix(path.suffix + ".meta.json"), meta)

"""Command-line entry point: ``infostab <command> [flags]``.

Exit status is 0 on success (or a passing certificate), 2 when a certificate
fails, and 1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import entropy, harness, oracle, stability
from .core import ProbabilityVector, as_alpha
from .equation import OpenTriangleSampler, SamplerScheme, sup_residual
from .errors import InfostabError
from .functions import (
    Callable01,
    ClosedFunction,
    LogForm,
    NoiseKind,
    PerturbationSpec,
    Perturbed,
    PowerForm,
    Tabulated,
)

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(InfostabError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {part!r}")
        out[key.strip()] = value.strip()
    return out


def parse_function(spec: str, alpha):
    """Build f from a CSV path or a builtin spec.

    Builtins: ``power:a=..,b=..``, ``log:lambda=..,c=..``, ``const:c=..``,
    ``identity`` and ``tsallis`` (the two-symbol entropy of degree alpha).
    Any builtin also takes ``eps=``, ``kind=`` and ``noise_seed=``.
    """
    name, _, rest = spec.partition(":")
    if name not in ("power", "log", "const", "identity", "tsallis"):
        path = Path(spec)
        if not path.exists():
            raise UsageError(f"{spec!r} is neither a builtin function nor an existing CSV file")
        return Tabulated.from_csv(path)
    params = _kv(rest)
    eps = float(params.pop("eps", 0.0))
    kind = params.pop("kind", NoiseKind.UNIFORM_IID.value)
    noise_seed = int(params.pop("noise_seed", 0))
    try:
        if name == "power":
            f = PowerForm(float(params.pop("a")), float(params.pop("b")), alpha)
        elif name == "log":
            f = LogForm(float(params.pop("lambda")), float(params.pop("c")))
        elif name == "const":
            f = LogForm(0.0, float(params.pop("c")))
        elif name == "identity":
            f = Callable01(lambda x: x, "identity")
        else:
            f = entropy.two_symbol_degree_alpha(alpha)
    except KeyError as exc:
        raise UsageError(f"builtin {name!r} needs parameter {exc.args[0]!r}") from exc
    if params:
        raise UsageError(f"unknown parameters for {name!r}: {sorted(params)}")
    if eps > 0.0:
        f = Perturbed(f, PerturbationSpec(eps, NoiseKind(kind), noise_seed))
    return f


def parse_vectors(args) -> np.ndarray:
    if args.p:
        rows = [[float(v) for v in args.p.split(",")]]
    elif args.csv:
        with open(args.csv, newline="", encoding="utf-8") as fh:
            rows = [[float(v) for v in r] for r in csv.reader(fh) if r and not r[0].startswith("#")]
    else:
        raise UsageError("give a probability vector with --p or --csv")
    if len({len(r) for r in rows}) != 1:
        raise UsageError("all probability vectors must have the same length")
    for r in rows:
        ProbabilityVector(r)
    return np.asarray(rows, dtype=float)


def _alpha(args):
    if args.alpha is None:
        raise UsageError("--alpha is required")
    return as_alpha(args.alpha)


def _emit(args, payload) -> None:
    text = harness.dumps(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _sampler(args) -> OpenTriangleSampler:
    return OpenTriangleSampler(
        count=args.samples, margin=args.margin, seed=args.seed, scheme=SamplerScheme(args.scheme)
    )


# ---------------------------------------------------------------------------
# commands


def cmd_constants(args) -> int:
    if args.alpha is not None:
        grid = [args.alpha]
    else:
        try:
            lo, hi, n = (float(v) for v in args.grid.split(":"))
        except ValueError as exc:
            raise UsageError(f"--grid expects LO:HI:N, got {args.grid!r}") from exc
        n = int(n)
        if args.log:
            if lo * hi <= 0:
                raise UsageError("a log-spaced grid needs LO and HI of the same sign")
            grid = np.sign(lo) * np.geomspace(abs(lo), abs(hi), n)
        else:
            grid = np.linspace(lo, hi, n)
    rows, summary = harness.sweep_constants(grid)
    if args.out:
        harness.write_constants_csv(rows, args.out)
    else:
        harness.write_constants_csv(rows, sys.stdout)
    if args.summary:
        harness.write_json(args.summary, summary)
    return EXIT_OK


def cmd_residual(args) -> int:
    alpha = _alpha(args)
    f = parse_function(args.input, alpha)
    res = sup_residual(f, alpha, _sampler(args))
    report = {
        "alpha": alpha.value,
        "eps_hat": res.eps_hat,
        "argmax": list(res.argmax),
        "p99": res.p99,
        "samples": res.samples,
        "margin": args.margin,
        "seed": args.seed,
    }
    if args.report:
        harness.write_json(args.report, report)
    _emit(args, report)
    return EXIT_OK


def _candidate_payload(f, alpha) -> dict:
    cand = stability.extract_candidate(f, alpha)
    out = {"alpha": alpha.value, "candidate": cand.to_dict()}
    if not alpha.is_zero:
        out["c"] = stability.extract_c(f, alpha)
    else:
        out["log_defect"] = stability.fit_lambda_log(f).log_defect
    return out


def cmd_extract(args) -> int:
    alpha = _alpha(args)
    _emit(args, _candidate_payload(parse_function(args.input, alpha), alpha))
    return EXIT_OK


def _instance_from_args(args):
    """(alpha, interior f, closed f or None, sampler) from --config and/or --input.

    Sampling flags override the config file; unset flags fall back to it.
    """
    if args.config:
        cfg = harness.ExperimentConfig.load(args.config)
        cfg = cfg.replace(alpha=args.alpha, samples=args.samples, margin=args.margin,
                          seed=args.seed, scheme=args.scheme)
        inst = harness.gen_instance(cfg, write=False)
        return as_alpha(cfg.alpha), inst.function, inst.closed, cfg.sampler()
    alpha = _alpha(args)
    if not args.input:
        raise UsageError("give --input or --config")
    sampler = OpenTriangleSampler(
        count=args.samples or 20_000,
        margin=args.margin or 1e-4,
        seed=args.seed or 0,
        scheme=SamplerScheme(args.scheme or SamplerScheme.HALTON.value),
    )
    return alpha, parse_function(args.input, alpha), None, sampler


def cmd_certify(args) -> int:
    alpha, f, closed, sampler = _instance_from_args(args)
    if args.domain == "closed":
        if closed is None or args.f0 is not None or args.f1 is not None:
            f0 = args.f0 if args.f0 is not None else (closed(0.0) if closed else 0.0)
            f1 = args.f1 if args.f1 is not None else (closed(1.0) if closed else 0.0)
            closed = ClosedFunction(f, f0, f1)
        cert = stability.certify_closed(closed, alpha, sampler, args.deviation_points)
    else:
        cert = stability.certify_open(f, alpha, sampler, args.deviation_points)
    if args.diagnostics:
        harness.write_json(args.diagnostics, {"verdict": cert.verdict, **cert.diagnostics})
    _emit(args, cert.to_dict())
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_entropy(args) -> int:
    P = parse_vectors(args)
    payload = {"shannon": [float(v) for v in np.atleast_1d(entropy.shannon(P))]}
    if args.alpha is not None:
        payload["alpha"] = as_alpha(args.alpha).value
        payload["degree_alpha"] = [float(v) for v in np.atleast_1d(entropy.degree_alpha(P, args.alpha))]
    _emit(args, payload)
    return EXIT_OK


def cmd_recursive(args) -> int:
    alpha = _alpha(args)
    P = parse_vectors(args)
    i2 = parse_function(args.input, alpha)
    built = np.atleast_1d(entropy.recursive_build(i2, alpha, P))
    closed_form = np.atleast_1d(entropy.degree_alpha(P, alpha))
    _emit(args, {
        "alpha": alpha.value,
        "recursive": [float(v) for v in built],
        "degree_alpha": [float(v) for v in closed_form],
        "max_abs_difference": float(np.max(np.abs(built - closed_form))),
    })
    return EXIT_OK


def cmd_system_certify(args) -> int:
    alpha = _alpha(args)
    i2 = parse_function(args.input, alpha)
    if args.slack == "measured":
        slack = entropy.measured_slack(i2, alpha, args.n_max, seed=args.seed or 0)
    else:
        slack = tuple(float(v) for v in args.slack.split(","))
    system = entropy.MeasureSystem(i2, alpha, slack)
    cert = entropy.system_certificate(system, args.n_max, args.count, args.seed or 0)
    payload = cert.to_dict()
    payload["slack"] = list(system.slack)
    _emit(args, payload)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_oracle_fit(args) -> int:
    alpha = _alpha(args)
    f = parse_function(args.input, alpha)
    margin = args.margin
    xs = np.linspace(margin, 1.0 - margin, args.grid_points)
    if alpha.is_zero:
        fit = oracle.chebyshev_fit_log(f, xs)
        oracle_part = {"lambda": fit.lam, "c": fit.c, "dev": fit.dev}
    else:
        fit = oracle.chebyshev_fit_power(f, alpha, xs)
        oracle_part = {"a": fit.a, "b": fit.b, "dev": fit.dev}
    constructive = _candidate_payload(f, alpha)
    cand = stability.candidate_from_dict(constructive["candidate"])
    constructive["dev"] = oracle.sup_deviation_of(f, lambda x: cand.evaluate(x, alpha), xs)
    _emit(args, {"alpha": alpha.value, "grid_points": args.grid_points,
                 "oracle": oracle_part, "constructive": constructive})
    return EXIT_OK


CONFIG_FLAGS = {
    "a": float, "b": float, "lam": float, "c": float, "epsilon": float, "noise_kind": str,
    "noise_seed": int, "samples": int, "margin": float, "scheme": str, "deviation_points": int,
    "domain": str, "f0": float, "f1": float, "table_points": int, "manifest_path": str,
    "table_path": str, "family": str,
}


def _config_from_args(args) -> harness.ExperimentConfig:
    data = {}
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        data = dict(harness.tomllib.loads(text))
    for key in CONFIG_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if args.alpha is not None:
        data["alpha"] = args.alpha
    if args.seed is not None:
        data["seed"] = args.seed
    return harness.ExperimentConfig.from_mapping(data)


def cmd_gen(args) -> int:
    cfg = _config_from_args(args)
    if args.out:
        cfg = cfg.replace(manifest_path=args.out)
    if args.save_config:
        cfg.save(args.save_config)
    inst = harness.gen_instance(cfg)
    sys.stdout.write(harness.dumps(inst.manifest))
    return EXIT_OK


def cmd_batch(args) -> int:
    report = harness.run_batch(args.configs, workers=args.workers)
    if args.out:
        harness.write_report(report, args.out)
    sys.stdout.write(harness.dumps(report["summary"]))
    s = report["summary"]
    if s["completed"] == 0:
        return EXIT_ERROR
    return EXIT_OK if s["failed"] == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parser


def _common(p, seed=True):
    p.add_argument("--alpha", type=float, help="exponent alpha")
    p.add_argument("--out", help="write the result here as well as to stdout")
    if seed:
        p.add_argument("--seed", type=int, help="sampler seed")


def _sampling(p, defaults=True):
    p.add_argument("--samples", type=int, default=20_000 if defaults else None)
    p.add_argument("--margin", type=float, default=1e-4 if defaults else None)
    p.add_argument("--scheme", default=SamplerScheme.HALTON.value if defaults else None,
                   choices=[s.value for s in SamplerScheme])


def _vectors(p):
    p.add_argument("--p", help="comma-separated probability vector")
    p.add_argument("--csv", help="CSV file with one probability vector per row")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infostab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="K(alpha), T(alpha) and their relation")
    _common(p)
    p.add_argument("--grid", default="-30:-1e-6:10000",
                   help="LO:HI:N (write --grid=LO:HI:N when LO is negative)")
    p.add_argument("--log", action="store_true", help="log-spaced grid (LO, HI of one sign)")
    p.add_argument("--summary", help="JSON file for the sweep summary")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("residual", help="sampled sup of the equation residual")
    _common(p, seed=False)
    _sampling(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", required=True, help="CSV path or builtin spec")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("extract", help="constructive candidate solution")
    _common(p)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("certify", help="stability certificate")
    _common(p)
    _sampling(p, defaults=False)
    p.add_argument("--input")
    p.add_argument("--config", help="experiment config file")
    p.add_argument("--domain", choices=("open", "closed"), default="open")
    p.add_argument("--f0", type=float, help="f(0) for the closed domain")
    p.add_argument("--f1", type=float, help="f(1) for the closed domain")
    p.add_argument("--deviation-points", type=int, default=stability.DEFAULT_DEVIATION_POINTS)
    p.add_argument("--diagnostics", help="JSON file for the diagnostic fields")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("entropy", help="Shannon and degree-alpha entropies")
    _common(p)
    _vectors(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("recursive", help="alpha-recursive build compared with the closed form")
    _common(p)
    _vectors(p)
    p.add_argument("--input", default="tsallis", help="two-symbol measure as f(x) = I2(1-x, x)")
    p.set_defaults(func=cmd_recursive)

    p = sub.add_parser("system-certify", help="per-n bounds for a recursively generated system")
    _common(p)
    p.add_argument("--input", default="tsallis")
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--slack", default="measured", help="'measured' or eps_1,eps_2,...")
    p.set_defaults(func=cmd_system_certify)

    p = sub.add_parser("oracle-fit", help="sup-norm oracle fit next to the constructive candidate")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--margin", type=float, default=1e-4)
    p.add_argument("--grid-points", type=int, default=2_000)
    p.set_defaults(func=cmd_oracle_fit)

    p = sub.add_parser("gen", help="generate an instance and its manifest")
    _common(p)
    p.add_argument("--config")
    p.add_argument("--save-config", help="write the effective config here")
    for key, typ in CONFIG_FLAGS.items():
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("batch", help="run a batch of experiment configs")
    p.add_argument("configs", nargs="+", help="config files")
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--workers", type=int, help="worker threads (default: INFOSTAB_WORKERS or 4)")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfostabError, ValueError, ArithmeticError, OSError, KeyError) as exc:
        print(f"infostab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``ethf run | predict | validate``.

Exit codes: 0 success, 1 configuration or domain error, 2 numerical failure,
3 validation failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .entanglement import binary_entropy, predicted_entropy_multi, predicted_entropy_single
from .experiments import MODES, ExperimentConfig, run_experiment
from .goe import EigensolverError
from .model import ModelParams
from .thermal import (
    avg_occupation,
    avg_occupation_high_t,
    avg_occupation_low_t,
    effective_beta,
)
from .validation import LEVELS, run_checks

EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_VALIDATION = 3

# config-file key -> (argparse dest, parser)
_KEYS = {
    "mode": ("mode", str),
    "n": ("n", int),
    "np": ("np", int),
    "filling": ("filling", float),
    "alpha": ("alpha", float),
    "eta": ("eta", float),
    "beta": ("beta", float),
    "realizations": ("realizations", int),
    "sizes": ("sizes", str),
    "seed": ("seed", int),
    "workers": ("workers", int),
    "out": ("out", str),
    "exclude_flagged": ("exclude_flagged", str),
}


class ConfigError(ValueError):
    pass


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file (``#`` starts a comment)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = parts
        key = key.strip().lower().replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        dest, conv = _KEYS[key]
        try:
            values[dest] = conv(value.strip())
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from None
    return values


def _parse_sizes(text) -> tuple[int, ...]:
    if text is None or text == "":
        return ()
    try:
        return tuple(int(s) for s in str(text).split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"sizes must be a comma-separated integer list, got {text!r}") from None


def _parse_bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _params(n, alpha, eta) -> ModelParams:
    if n is None:
        raise ConfigError("missing required field 'n'")
    return ModelParams.with_default_alpha(n, 1.0 if eta is None else eta, alpha)


def _resolve_np(n, np_, filling) -> int:
    if np_ is not None:
        return np_
    if filling is not None:
        return int(round(filling * n))
    raise ConfigError("missing required field 'np' (or 'filling')")


def build_run_config(args) -> tuple[ExperimentConfig, Path]:
    merged = read_config(args.config) if args.config else {}
    for dest, _ in _KEYS.values():
        flag = getattr(args, dest, None)
        if flag is not None:
            merged[dest] = flag
    if merged.get("seed") is None:
        raise ConfigError("missing required field 'seed' (set --seed or 'seed = ...' in the config)")
    if merged.get("mode") is None:
        raise ConfigError(f"missing required field 'mode' (one of {', '.join(MODES)})")
    params = _params(merged.get("n"), merged.get("alpha"), merged.get("eta"))
    workers = merged.get("workers")
    if workers is None:
        env = os.environ.get("ETHF_WORKERS", "1")
        try:
            workers = int(env)
        except ValueError:
            raise ConfigError(f"ETHF_WORKERS must be an integer, got {env!r}") from None
    cfg = ExperimentConfig(
        params=params,
        Np=_resolve_np(params.N, merged.get("np"), merged.get("filling")),
        realizations=merged.get("realizations", 100),
        seed=merged["seed"],
        mode=merged["mode"],
        sizes=_parse_sizes(merged.get("sizes")),
        beta=merged.get("beta"),
        workers=workers,
        exclude_flagged=_parse_bool(merged.get("exclude_flagged", "true")),
    )
    if cfg.seed < 0 or cfg.seed >= 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {cfg.seed}")
    return cfg, Path(merged.get("out", "ethf_out"))


def cmd_run(args) -> int:
    try:
        cfg, outdir = build_run_config(args)
        report = run_experiment(cfg)
    except (EigensolverError, ArithmeticError, RuntimeError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = report.write(outdir)
    except OSError as exc:
        print(f"error: cannot write report to {outdir}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"mode {cfg.mode}  N={cfg.params.N}  Np={cfg.Np}  realizations={report.meta['realizations_used']}"
          f"  seed={cfg.seed}")
    print(report.summary())
    if report.flagged:
        print(f"{len(report.flagged)} record(s) with |z| > 5")
    print(f"wrote {len(paths)} files to {outdir}")
    return 0


def _fmt(x) -> str:
    return "-" if x is None else format(x, ".12g")


def predictions(args) -> list[tuple[str, float | None]]:
    """Analytic predictions for ``args`` as ``(name, value)`` pairs."""
    params = _params(args.n, args.alpha, args.eta)
    N = params.N
    given = sum(v is not None for v in (args.np, args.filling, args.beta))
    if given != 1:
        raise ConfigError("give exactly one of --np, --filling or --beta")
    out = [("N", N), ("alpha", params.alpha), ("eta", params.eta), ("R", params.radius)]
    if args.beta is None:
        filling = args.np / N if args.np is not None else args.filling
        if not 0 < filling <= 0.5:
            raise ConfigError(f"filling must lie in (0, 1/2], got {filling}")
        beta = effective_beta(params, filling)
    else:
        beta = args.beta
        if beta < 0:
            raise ConfigError(f"beta must be >= 0, got {beta}")
        filling = avg_occupation(params, beta).n_mean
    np_eff = filling * N
    quad = avg_occupation(params, beta)
    high = avg_occupation_high_t(params, beta)
    out += [("filling", filling), ("Np", np_eff), ("beta", beta),
            ("n_mean_quadrature", quad.n_mean), ("n_sq_mean_quadrature", quad.n_sq_mean),
            ("n_mean_high_t", high.n_mean), ("n_sq_mean_high_t", high.n_sq_mean)]
    if beta > 0:
        low = avg_occupation_low_t(params, beta)
        out += [("n_mean_bessel", low.n_mean), ("n_sq_mean_bessel", low.n_sq_mean),
                ("n_mean_bessel_minus_quadrature", low.n_mean - quad.n_mean),
                ("boltzmann_parameter", math.exp(-beta * (params.alpha - params.radius)))]
    out += [("energy_mean", np_eff * params.alpha), ("energy_var", np_eff * N * params.eta**2),
            ("offdiag_var_eigenstate", np_eff / N**2), ("offdiag_var_thermal", quad.n_sq_mean / N),
            ("entropy_density", float(binary_entropy(filling)))]
    for m in _parse_sizes(args.sizes):
        if not 1 <= m <= N:
            raise ConfigError(f"subsystem size {m} out of range [1, {N}]")
        if args.np == 1:
            out.append((f"entropy_ent1[m={m}]", predicted_entropy_single(N, m)))
        else:
            out.append((f"entropy_entmany[m={m}]", predicted_entropy_multi(N, np_eff, m)))
    return out


def cmd_predict(args) -> int:
    try:
        rows = predictions(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k.ljust(width)}  {_fmt(v)}")
    return 0


def cmd_validate(args) -> int:
    results = run_checks(args.level)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else 0


def _model_flags(p, required=False):
    p.add_argument("--n", type=int, required=required, help="number of sites N")
    p.add_argument("--alpha", type=float, help="on-site energy (default 4 sqrt(N) eta)")
    p.add_argument("--eta", type=float, help="coupling scale (default 1)")
    p.add_argument("--np", type=int, help="particle number Np")
    p.add_argument("--filling", type=float, help="Np / N")
    p.add_argument("--beta", type=float, help="inverse temperature")
    p.add_argument("--sizes", help="comma-separated subsystem sizes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ethf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo experiment")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--seed", type=int, help="master seed (required)")
    run.add_argument("--workers", type=int, help="worker processes (default $ETHF_WORKERS or 1)")
    run.add_argument("--out", help="output directory (default ./ethf_out)")
    run.add_argument("--realizations", type=int)
    _model_flags(run)
    run.set_defaults(func=cmd_run)

    pred = sub.add_parser("predict", help="print analytic predictions")
    _model_flags(pred, required=True)
    pred.set_defaults(func=cmd_predict)

    val = sub.add_parser("validate", help="run the built-in oracle checks")
    val.add_argument("--level", choices=sorted(LEVELS), default="fast")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

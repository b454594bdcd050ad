"""Batch command-line front end.

Subcommands:
  estimate          run the sample-size search and write JSON/CSV/SVG artifacts
  sweep-proportion  FDR against the expected significant proportion at fixed n
  fit               fit ppca/ppcca to a pilot CSV and save the model JSON

Exit codes: 0 success, 2 validation error, 3 non-convergence (grid exhausted),
1 internal error.  A config file (key=value lines mirroring the flag names)
can pre-set any flag; explicit flags win.  METSIZER_SEED is the fallback seed.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from . import dataio
from .errors import ConfigError, MetsizerError, PilotDataError
from .fit import fit_ppca, fit_ppcca
from .search import estimate_sample_size, sweep_proportion
from .types import AnalysisModel, EstimationConfig, FittedPilot, PriorDraws

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3

# field names raised by EstimationConfig.validate -> the flag the user touches
_FIELD_TO_FLAG = {
    "model.kind": "--model",
    "model.q": "--latent-dim",
    "model.n_covariates": "--covariates",
    "p": "--bins",
    "m": "--prop-significant",
    "target_fdr": "--target-fdr",
    "n_min": "--min-n",
    "n_max": "--max-n",
    "grid_step": "--grid-step",
    "group_ratio": "--group-ratio",
    "permutations": "--permutations",
    "simulations": "--simulations",
    "delta": "--delta",
    "seed": "--seed",
}


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--model", choices=["ppca", "ppcca", "dppca"], default=None,
                    help="analysis model the study will use (default ppca)")
    sp.add_argument("--covariates", type=int, default=None, metavar="INT",
                    help="number of covariates (required for ppcca)")
    sp.add_argument("--latent-dim", type=int, default=None, metavar="INT",
                    help="latent dimension q (default 2)")
    sp.add_argument("--bins", type=int, default=None, metavar="INT",
                    help="number of spectral bins / features p (default 200)")
    sp.add_argument("--prop-significant", type=float, default=None, metavar="FLOAT",
                    help="expected proportion of significant features (default 0.2)")
    sp.add_argument("--target-fdr", type=float, default=None, metavar="FLOAT",
                    help="target false discovery rate (default 0.05)")
    sp.add_argument("--min-n", type=int, default=None, metavar="INT",
                    help="smallest total sample size to consider (default 4)")
    sp.add_argument("--max-n", type=int, default=None, metavar="INT",
                    help="largest total sample size to consider (default 200)")
    sp.add_argument("--grid-step", type=int, default=None, metavar="INT",
                    help="total-n increment between candidates (default 2)")
    sp.add_argument("--group-ratio", type=str, default=None, metavar="A:B",
                    help="n1:n2 split ratio (default 1:1)")
    sp.add_argument("--permutations", type=int, default=None, metavar="INT",
                    help="label permutations per dataset (default 20)")
    sp.add_argument("--simulations", type=int, default=None, metavar="INT",
                    help="pilot datasets per candidate size (default 20)")
    sp.add_argument("--delta", type=float, default=None, metavar="FLOAT",
                    help="planted effect size in within-group SD units (default 2.3)")
    sp.add_argument("--pilot", type=str, default=None, metavar="PATH",
                    help="experimental pilot CSV; simulation then uses fitted parameters")
    sp.add_argument("--schema", type=str, default=None, metavar="PATH",
                    help="JSON file describing the pilot CSV layout")
    sp.add_argument("--seed", type=int, default=None, metavar="INT",
                    help="random seed (fallback: METSIZER_SEED, then 0)")
    sp.add_argument("--out", type=str, default=None, metavar="DIR",
                    help="output directory (default metsizer_out)")
    sp.add_argument("--config", type=str, default=None, metavar="PATH",
                    help="key=value config file; explicit flags override it")
    sp.add_argument("--threads", type=int, default=None, metavar="INT",
                    help="worker threads (default: machine parallelism)")
    sp.add_argument("--full-grid", action="store_true", default=None,
                    help="evaluate every grid point (no early stopping)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metsizer",
        description="Estimate the sample size a two-group high-dimensional study "
                    "needs to hit a target FDR, from simulated or real pilot data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run the sample-size search")
    _add_common_flags(est)

    sweep = sub.add_parser(
        "sweep-proportion",
        help="FDR percentiles across significant proportions at fixed sample sizes",
    )
    _add_common_flags(sweep)
    sweep.add_argument("--n-list", type=str, default=None, metavar="N1,N2,...",
                       help="total sample sizes to evaluate (default 10,20,30)")
    sweep.add_argument("--proportions", type=str, default=None, metavar="M1,M2,...",
                       help="proportions to evaluate (default 0.1,0.2,0.3)")

    fit = sub.add_parser("fit", help="fit ppca/ppcca to a pilot CSV, emit model JSON")
    _add_common_flags(fit)

    return parser


def _read_config_file(path: str) -> dict:
    """key=value lines; keys mirror the flag names (dashes or underscores)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_TYPES = {
    "model": str, "covariates": int, "latent_dim": int, "bins": int,
    "prop_significant": float, "target_fdr": float, "min_n": int, "max_n": int,
    "grid_step": int, "group_ratio": str, "permutations": int, "simulations": int,
    "delta": float, "pilot": str, "schema": str, "seed": int, "out": str,
    "threads": int, "full_grid": lambda s: s.lower() in ("1", "true", "yes"),
    "n_list": str, "proportions": str,
}


def _setting(args: argparse.Namespace, file_values: dict, key: str, default):
    explicit = getattr(args, key, None)
    if explicit is not None:
        return explicit
    if key in file_values:
        caster = _CONFIG_TYPES.get(key, str)
        try:
            return caster(file_values[key])
        except ValueError as exc:
            raise ConfigError(key, f"bad config-file value {file_values[key]!r}: {exc}") from exc
    return default


def _parse_ratio(text: str):
    try:
        a, _, b = text.partition(":")
        return (int(a), int(b))
    except ValueError as exc:
        raise ConfigError("group_ratio", f"expected A:B, got {text!r}") from exc


def _parse_number_list(text: str, caster):
    try:
        return [caster(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError("n_list", f"bad list {text!r}: {exc}") from exc


def _resolve_seed(args: argparse.Namespace, file_values: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in file_values:
        return int(file_values["seed"])
    env = os.environ.get("METSIZER_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError("seed", f"METSIZER_SEED is not an integer: {env!r}") from exc
    return 0


def _build_config(args: argparse.Namespace, file_values: dict) -> EstimationConfig:
    model = AnalysisModel(
        kind=str(_setting(args, file_values, "model", "ppca")).lower(),
        q=_setting(args, file_values, "latent_dim", 2),
        n_covariates=_setting(args, file_values, "covariates", 0) or 0,
    )
    ratio = _setting(args, file_values, "group_ratio", "1:1")
    if isinstance(ratio, str):
        ratio = _parse_ratio(ratio)
    return EstimationConfig(
        model=model,
        p=_setting(args, file_values, "bins", 200),
        m=_setting(args, file_values, "prop_significant", 0.2),
        target_fdr=_setting(args, file_values, "target_fdr", 0.05),
        n_min=_setting(args, file_values, "min_n", 4),
        n_max=_setting(args, file_values, "max_n", 200),
        grid_step=_setting(args, file_values, "grid_step", 2),
        group_ratio=ratio,
        permutations=_setting(args, file_values, "permutations", 20),
        simulations=_setting(args, file_values, "simulations", 20),
        delta=_setting(args, file_values, "delta", 2.3),
        seed=_resolve_seed(args, file_values),
        full_grid=bool(_setting(args, file_values, "full_grid", False)),
    )


def _load_pilot(args: argparse.Namespace, file_values: dict):
    pilot_path = _setting(args, file_values, "pilot", None)
    if pilot_path is None:
        return None
    schema_path = _setting(args, file_values, "schema", None)
    schema = dataio.load_pilot_schema(schema_path) if schema_path else dataio.PilotFileSchema()
    return dataio.load_pilot_csv(pilot_path, schema)


def _attach_fitted_source(config: EstimationConfig, pilot, kind: str) -> EstimationConfig:
    if kind == "ppca":
        fitted = fit_ppca(pilot, config.model.q)
    elif kind == "ppcca":
        if pilot.covariates is None:
            raise ConfigError("schema", "ppcca fitting needs covariate columns in the pilot schema")
        fitted = fit_ppcca(pilot, config.model.q)
    else:
        raise ConfigError("model.kind", "pilot-based fitting supports ppca and ppcca only")
    config.source = FittedPilot(fitted)
    config.p = fitted.p
    if fitted.kind == "ppcca":
        config.model.n_covariates = fitted.covariates.shape[1]
    return config


def _out_dir(args: argparse.Namespace, file_values: dict) -> Path:
    out = Path(_setting(args, file_values, "out", "metsizer_out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _threads(args: argparse.Namespace, file_values: dict) -> int:
    t = _setting(args, file_values, "threads", None)
    if t is None:
        return max(1, os.cpu_count() or 1)
    if t < 1:
        raise ConfigError("threads", f"must be >= 1, got {t}")
    return t


def _cmd_estimate(args: argparse.Namespace) -> int:
    file_values = _read_config_file(args.config) if args.config else {}
    config = _build_config(args, file_values)
    pilot = _load_pilot(args, file_values)
    if pilot is not None:
        config = _attach_fitted_source(config, pilot, config.model.kind)
    config.validate()
    out = _out_dir(args, file_values)

    result = estimate_sample_size(config, threads=_threads(args, file_values))
    dataio.write_result(result, out / "result.json", out / "curve.csv")
    dataio.render_curve_svg(result, config.target_fdr, out / "curve.svg")

    if result.n_hat is None:
        print(f"No estimate: {result.no_estimate_reason} "
              f"(median FDR stayed above {config.target_fdr:g} up to n={config.n_max}; "
              f"raise --max-n or relax --target-fdr)")
        print(f"Artifacts written to {out}")
        return EXIT_NO_CONVERGENCE
    print(f"Estimated sample size: n = {result.n_hat} "
          f"({result.n1_hat} + {result.n2_hat} per group) at target FDR {config.target_fdr:g}")
    print(f"Evaluated {result.points_evaluated} grid points in {result.wall_time_s:.1f}s; "
          f"artifacts written to {out}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    file_values = _read_config_file(args.config) if args.config else {}
    config = _build_config(args, file_values)
    pilot = _load_pilot(args, file_values)
    if pilot is not None:
        config = _attach_fitted_source(config, pilot, config.model.kind)
    config.validate()
    n_list = _parse_number_list(str(_setting(args, file_values, "n_list", "10,20,30")), int)
    proportions = _parse_number_list(
        str(_setting(args, file_values, "proportions", "0.1,0.2,0.3")), float
    )
    out = _out_dir(args, file_values)
    records = sweep_proportion(config, n_list, proportions, threads=_threads(args, file_values))
    (out / "sweep.csv").write_text(dataio.sweep_csv_text(records), encoding="utf-8")
    dataio.render_sweep_svg(records, config.target_fdr, out / "sweep.svg")
    print(f"Swept {len(n_list)} sample sizes x {len(proportions)} proportions; "
          f"artifacts written to {out}")
    return EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    file_values = _read_config_file(args.config) if args.config else {}
    config = _build_config(args, file_values)
    pilot = _load_pilot(args, file_values)
    if pilot is None:
        raise ConfigError("pilot", "fit requires --pilot PATH")
    config = _attach_fitted_source(config, pilot, config.model.kind)
    out = _out_dir(args, file_values)
    fitted = config.source.fit
    dataio.write_fitted_model(fitted, out / "fitted_model.json")
    note = "" if fitted.converged else " (EM did not converge; result at max iterations)"
    print(f"Fitted {fitted.kind} with q={fitted.q} to {pilot.n}x{pilot.p} pilot data: "
          f"noise variance {fitted.noise_var:.4g}{note}")
    print(f"Model written to {out / 'fitted_model.json'}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "sweep-proportion":
            return _cmd_sweep(args)
        if args.command == "fit":
            return _cmd_fit(args)
        parser.error(f"unknown command {args.command!r}")
        return EXIT_VALIDATION
    except ConfigError as exc:
        flag = _FIELD_TO_FLAG.get(exc.field, exc.field)
        print(f"error: {flag}: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PilotDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MetsizerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

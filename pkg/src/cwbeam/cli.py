"""Configuration-driven scenario runner.

`cwbeam run config.json` executes one scenario, writes
`<output_dir>/<scenario>-<seed>.csv` (per-sample records),
`<scenario>-<seed>.summary.json` (config echo, summaries, claim verdicts)
and a diagnostic figure, prints one PASS/FAIL line per claim and exits 0
only if every claim holds.  `cwbeam list` shows the available scenarios.

Exit codes: 0 all claims pass, 1 claim failure, 2 config parse/schema error,
3 parameter validation error.

Config files are JSON with a versioned schema; unknown keys are rejected.
A `sweep` list of partial overrides runs several variants of one base
config, each with its own suffixed outputs.
"""

from __future__ import annotations

import argparse
import inspect
import json
import os
import sys

from .laser import LaserParams
from .scenarios import REGISTRY

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "CWBEAM_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_VALIDATION_ERROR = 3

_TOP_LEVEL_KEYS = {"schema_version", "scenario", "seed", "output_dir", "laser", "laser_b",
                   "scenario_params", "sweep"}
_LASER_KEYS = {"alpha_mag", "kappa", "T", "D", "n_packets", "z0_over_c", "omega0",
               "cavity_roundtrip"}


class ConfigError(Exception):
    """Malformed config: bad JSON, missing or unknown keys."""


class ValidationError(Exception):
    """Well-formed config with values the model rejects."""


def scenario_param_names(module) -> set:
    """Scenario kwargs a config may set (everything but the wiring arguments)."""
    signature = inspect.signature(module.run)
    return {name for name in signature.parameters
            if name not in ("params", "params_a", "params_b", "seed", "threads")}


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    return config


def validate_config(config: dict):
    unknown = set(config) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("schema_version", "scenario", "seed", "laser"):
        if key not in config:
            raise ConfigError(f"missing required config key: {key!r}")
    if config["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {config['schema_version']}, "
                          f"expected {SCHEMA_VERSION}")
    scenario = config["scenario"]
    if scenario not in REGISTRY:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {list(REGISTRY)}")
    for laser_key in ("laser", "laser_b"):
        laser = config.get(laser_key)
        if laser is None:
            continue
        if not isinstance(laser, dict):
            raise ConfigError(f"{laser_key!r} must be an object")
        bad = set(laser) - _LASER_KEYS
        if bad:
            raise ConfigError(f"unknown {laser_key} keys: {sorted(bad)}")
    params = config.get("scenario_params", {})
    if not isinstance(params, dict):
        raise ConfigError("'scenario_params' must be an object")
    allowed = scenario_param_names(REGISTRY[scenario][0])
    bad = set(params) - allowed
    if bad:
        raise ConfigError(f"unknown scenario_params for {scenario}: {sorted(bad)}; "
                          f"allowed: {sorted(allowed)}")
    if config.get("laser_b") is not None and scenario != "phase_locking":
        raise ConfigError("'laser_b' only applies to the phase_locking scenario")


def _merge_sweep(base: dict, override: dict) -> dict:
    merged = {k: (dict(v) if isinstance(v, dict) else v) for k, v in base.items()}
    for key, value in override.items():
        if key == "suffix":
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = value
    merged.pop("sweep", None)
    return merged


def execute(config: dict, output_dir, threads: int = 1, suffix: str = "",
            plots: bool = True) -> tuple:
    """Run one validated config; returns (ScenarioResult, written paths)."""
    scenario = config["scenario"]
    module = REGISTRY[scenario][0]
    try:
        laser = LaserParams(**config["laser"])
        kwargs = dict(config.get("scenario_params", {}))
        seed = int(config["seed"])
        if scenario == "phase_locking":
            laser_b = LaserParams(**config.get("laser_b", config["laser"]))
            result = module.run(laser, laser_b, seed=seed, threads=threads, **kwargs)
        else:
            result = module.run(laser, seed=seed, threads=threads, **kwargs)
    except (ValueError, TypeError) as exc:
        raise ValidationError(str(exc)) from exc

    os.makedirs(output_dir, exist_ok=True)
    stem = f"{scenario}-{result.seed}{suffix}"
    csv_path = os.path.join(output_dir, f"{stem}.csv")
    summary_path = os.path.join(output_dir, f"{stem}.summary.json")
    result.write_csv(csv_path)
    result.write_summary(summary_path)
    written = [csv_path, summary_path]
    if plots:
        from . import plots as plotting
        written += plotting.render(result, output_dir, stem)
    return result, written


def _print_claims(result):
    for claim in result.claims:
        verdict = "PASS" if claim.passed else "FAIL"
        print(f"{verdict} {result.scenario}.{claim.name}: observed {claim.observed:.6g} "
              f"{claim.comparator} {claim.threshold:.6g} -- {claim.description}")


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        validate_config(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    output_dir = (args.output_dir or config.get("output_dir")
                  or os.environ.get(OUTPUT_DIR_ENV) or ".")
    variants = [("", config)]
    for i, override in enumerate(config.get("sweep", []) or []):
        if not isinstance(override, dict):
            print("config error: sweep entries must be objects", file=sys.stderr)
            return EXIT_PARSE_ERROR
        merged = _merge_sweep(config, override)
        try:
            validate_config(merged)
        except ConfigError as exc:
            print(f"config error in sweep entry {i}: {exc}", file=sys.stderr)
            return EXIT_PARSE_ERROR
        variants.append((f"-{override.get('suffix', f'sweep{i}')}", merged))

    all_passed = True
    for suffix, variant in variants:
        try:
            result, written = execute(variant, output_dir, threads=args.threads,
                                      suffix=suffix, plots=not args.no_plots)
        except ValidationError as exc:
            print(f"validation error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION_ERROR
        _print_claims(result)
        for path in written:
            print(f"wrote {path}")
        all_passed = all_passed and result.all_passed
    return EXIT_OK if all_passed else EXIT_CLAIM_FAILED


def cmd_list(_args) -> int:
    for name, (_module, description) in REGISTRY.items():
        print(f"{name}: {description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwbeam",
        description="Simulations of a CW laser beam as a train of phase-correlated "
                    "coherent packets.")
    sub = parser.add_subparsers(dest="command", required=True)

    runner = sub.add_parser("run", help="run one scenario from a JSON config")
    runner.add_argument("config", help="path to the JSON run config")
    runner.add_argument("--output-dir", default=None,
                        help=f"output directory (default: config value, ${OUTPUT_DIR_ENV}, or .)")
    runner.add_argument("--seed", type=int, default=None, help="override the config seed")
    runner.add_argument("--threads", type=int, default=1,
                        help="worker threads for Monte Carlo loops (results are "
                             "identical for any value)")
    runner.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    runner.set_defaults(func=cmd_run)

    lister = sub.add_parser("list", help="list scenarios and the claims they test")
    lister.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

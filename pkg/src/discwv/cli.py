"""Command-line front end.

Subcommands:

    run          execute the pipelines requested by the config
    growth       emit the growth profile (CSV, or JSON by extension)
    exceptional  emit the exceptional-set artifacts
    verify       run verification checks (optionally at a single radius)
    classical    run the desk-scale plane power-series checks
    report       merge prior artifacts into a summary and plot-data CSV

Flags mirror the config file; environment variables with the DISCWV_ prefix
(e.g. DISCWV_WORKERS, DISCWV_GRID_POINTS, DISCWV_SEED, DISCWV_OUT,
DISCWV_CHECK, DISCWV_CONFIG) supply defaults that explicit flags override.
Exit codes: 0 all requested checks pass, 1 a check failed, 2 configuration
or usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import sys
from typing import Optional

from . import exceptional as exc
from . import growth as gr
from . import pipelines as pl
from . import verifier as ver
from .config import ENV_PREFIX, KNOWN_CHECKS, ConfigError, RunConfig, load_config
from .functions import DiscWVError

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


def _env(name: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + name)


def _add_common(parser: argparse.ArgumentParser, need_config: bool = True) -> None:
    parser.add_argument("--config", default=_env("CONFIG"),
                        required=need_config and _env("CONFIG") is None,
                        help="path to the YAML run config")
    parser.add_argument("--out", default=_env("OUT"),
                        help="output file or directory (per subcommand)")
    parser.add_argument("--check", default=_env("CHECK"),
                        help="comma-separated check ids overriding the config")
    parser.add_argument("--r", type=float,
                        default=float(_env("R")) if _env("R") else None,
                        help="single radius for verify")
    parser.add_argument("--grid-points", type=int,
                        default=int(_env("GRID_POINTS")) if _env("GRID_POINTS") else None,
                        help="override the grid resolution")
    parser.add_argument("--workers", type=int,
                        default=int(_env("WORKERS")) if _env("WORKERS") else None,
                        help="parallel workers for the grid sweep")
    parser.add_argument("--seed", type=int,
                        default=int(_env("SEED")) if _env("SEED") else None,
                        help="seed for randomized probe supplements")


def _effective_config(args: argparse.Namespace,
                      default_checks: Optional[tuple] = None) -> RunConfig:
    config = load_config(args.config)
    updates = {}
    if args.check:
        ids = tuple(s.strip() for s in args.check.split(",") if s.strip())
        updates["checks"] = ids
    elif default_checks is not None:
        updates["checks"] = default_checks
    if args.out:
        updates["out_dir"] = args.out
    if getattr(args, "workers", None):
        updates["workers"] = args.workers
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "grid_points", None):
        updates["params"] = dataclasses.replace(config.params,
                                                grid_points=args.grid_points)
    return dataclasses.replace(config, **updates) if updates else config


def _cmd_run(args: argparse.Namespace) -> int:
    config = _effective_config(args)
    outcome = pl.run(config)
    summary_path = os.path.join(outcome.out_dir, "summary.json")
    print(f"wrote artifacts to {outcome.out_dir}")
    with open(summary_path) as fh:
        doc = json.load(fh)
    for name, res in doc["pipelines"].items():
        if res["skipped"]:
            print(f"  {name}: skipped ({res['reason']})")
        else:
            print(f"  {name}: {'pass' if res['pass'] else 'FAIL'}")
    return EXIT_PASS if outcome.exit_code == 0 else EXIT_CHECK_FAILED


def _cmd_growth(args: argparse.Namespace) -> int:
    config = _effective_config(args, default_checks=())
    profile = gr.build_profile(config.function, config.tract, config.params,
                               workers=config.workers)
    out = args.out or os.path.join(config.out_dir, "profile.csv")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    if out.endswith(".json"):
        with open(out, "w") as fh:
            fh.write(gr.profile_to_json(profile))
    else:
        with open(out, "w", newline="") as fh:
            gr.profile_to_csv(profile, fh)
    print(f"wrote profile ({len(profile.samples)} samples, "
          f"order estimate {profile.order_estimate:.3f}) to {out}")
    return EXIT_PASS


def _cmd_exceptional(args: argparse.Namespace) -> int:
    config = _effective_config(args, default_checks=("exceptional",))
    out_dir = args.out or config.out_dir
    config = dataclasses.replace(config, checks=("exceptional",), out_dir=out_dir)
    outcome = pl.run(config)
    res = outcome.results["exceptional"]
    print(f"exceptional-set artifacts in {out_dir}: "
          f"{'pass' if res.passed else 'FAIL'}")
    return EXIT_PASS if outcome.exit_code == 0 else EXIT_CHECK_FAILED


def _cmd_verify(args: argparse.Namespace) -> int:
    default = ("thm1",)
    config = _effective_config(args, default_checks=default)
    checks = tuple(c for c in config.checks
                   if c in ("thm1", "thm2", "zero_order")) or default
    config = dataclasses.replace(config, checks=checks)

    if args.r is None:
        outcome = pl.run(config)
        for name in checks:
            res = outcome.results[name]
            state = "skipped" if res.skipped else ("pass" if res.passed else "FAIL")
            print(f"  {name}: {state}")
        return EXIT_PASS if outcome.exit_code == 0 else EXIT_CHECK_FAILED

    # single-radius mode: one JSON record per requested check at the nearest
    # non-exceptional grid radius
    profile = gr.build_profile(config.function, config.tract, config.params,
                               workers=config.workers)
    eset = exc.e_set_failure(profile)
    candidates = [profile.samples[int(i)] for i in eset.non_exceptional_indices()]
    if not candidates:
        print("no non-exceptional radii on the grid", file=sys.stderr)
        return EXIT_CHECK_FAILED
    s = min(candidates, key=lambda smp: abs(smp.r - args.r))
    z_r, w_r = ver.anchor_geometry(s)
    sigma = s.eps / ver.SIGMA_DIVISOR
    opts = config.verify
    records = []
    if "thm1" in checks:
        records.append(ver.tract_disc_check(config.function, config.tract,
                                            s.r, z_r, sigma, w_r=w_r))
        records.append(ver.monomial_check(config.function, config.tract, s.r,
                                          z_r, s.a, sigma, w_r=w_r,
                                          tol_floor=opts.tol_floor))
        records.append(ver.logderiv_check(config.function, config.tract, s.r,
                                          z_r, s.a, sigma, w_r=w_r,
                                          beta=config.params.beta,
                                          delta=config.params.delta,
                                          c_g=opts.c_g, tol_floor=opts.tol_floor))
    if "thm2" in checks:
        records.extend(ver.higher_logderiv_check(
            config.function, config.tract, None, s.r, z_r, s.a, s.eps,
            config.params.M, w_r=w_r, beta=config.params.beta,
            delta=config.params.delta, c_g=opts.c_g,
            tol_floor=opts.tol_floor, aeps_min=opts.aeps_min))
    if "zero_order" in checks:
        _, c_fits = ver.zero_order_sweep(config.function, config.tract,
                                         profile, eset, config.params.M,
                                         max_radii=32)
        records.extend(ver.zero_order_checks(
            config.function, config.tract, profile, eset, s.r,
            config.params.M, c_fits, control_floor=opts.control_floor))

    lines = [json.dumps(rec.to_dict()) for rec in records]
    text = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_PASS if all(rec.passed for rec in records) else EXIT_CHECK_FAILED


def _cmd_classical(args: argparse.Namespace) -> int:
    config = _effective_config(args, default_checks=("classical",))
    res, records = pl.run_classical_pipeline(config)
    lines = [json.dumps(rec.to_dict()) for rec in records]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if res.skipped:
        print(f"classical: skipped ({res.reason})", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return EXIT_PASS if res.passed else EXIT_CHECK_FAILED


def _cmd_report(args: argparse.Namespace) -> int:
    directory = args.dir or args.out or "out"
    code, summary = pl.merge_report(directory, out_path=args.out
                                    if args.out and args.out.endswith(".csv") else None)
    print(json.dumps(summary, indent=1))
    return EXIT_PASS if code == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discwv",
        description="Growth indicators, exceptional sets and local "
                    "monomial asymptotics for functions in the unit disc.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured pipelines")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_growth = sub.add_parser("growth", help="emit the growth profile")
    _add_common(p_growth)
    p_growth.set_defaults(func=_cmd_growth)

    p_exc = sub.add_parser("exceptional", help="emit exceptional-set artifacts")
    _add_common(p_exc)
    p_exc.set_defaults(func=_cmd_exceptional)

    p_verify = sub.add_parser("verify", help="run verification checks")
    _add_common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_classical = sub.add_parser("classical", help="plane power-series checks")
    _add_common(p_classical)
    p_classical.set_defaults(func=_cmd_classical)

    p_report = sub.add_parser("report", help="merge artifacts into a summary")
    p_report.add_argument("--dir", default=_env("OUT"),
                          help="artifact directory to merge")
    p_report.add_argument("--out", default=None,
                          help="path for the plot-data CSV")
    p_report.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_CONFIG_ERROR if err.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except pl.MissingArtifact as err:
        print(f"{err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except DiscWVError as err:
        print(f"pipeline error: {err}", file=sys.stderr)
        return EXIT_CHECK_FAILED


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

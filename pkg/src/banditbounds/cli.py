"""Command-line front end: one subcommand per experiment mode.

Flags mirror the config fields one to one; an optional JSON config file
supplies defaults and explicit flags override it.  Exit status: 0 on
success, 1 when the oracle suite reports a contractual failure, 2 on an
invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dataclass_fields

from .harness import (
    ExperimentConfig,
    run_compare_concentration,
    run_oracles,
    run_simulate,
    run_verify_bounds,
)

__all__ = ["build_parser", "main"]

_RUNNERS = {
    "simulate": run_simulate,
    "verify-bounds": run_verify_bounds,
    "oracles": run_oracles,
    "compare-concentration": run_compare_concentration,
}


def _parse_means(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"means must be comma-separated numbers, got {text!r}"
        ) from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", help="JSON file of config fields; explicit flags override it"
    )
    parser.add_argument("--delta", type=float, help="confidence level in (0, 1)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--outdir", help="output directory")
    parser.add_argument(
        "--workers", type=int, help="worker processes for trajectory sweeps"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditbounds",
        description="Seeded experiment runner for the bandit bound toolkit.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    sim = sub.add_parser(
        "simulate",
        help="play the smoothed Gibbs strategy; emit regret quantiles vs the envelope",
    )
    ver = sub.add_parser(
        "verify-bounds",
        help="check both bound routes at every round; report trajectory coverage",
    )
    for p in (sim, ver):
        _add_common(p)
        p.add_argument("--n-arms", type=int, help="number of arms K")
        p.add_argument("--horizon", type=int, help="rounds per trajectory")
        p.add_argument("--trajectories", type=int, help="number of trajectories M")
        p.add_argument(
            "--means",
            type=_parse_means,
            help='comma-separated arm means, e.g. "0.9,0.1" (default: evenly spread)',
        )
        p.add_argument("--reward-kind", choices=("bernoulli", "point", "beta"))
        p.add_argument(
            "--warmup-length", type=int, help="override the K^3 uniform warmup"
        )
    sim.add_argument(
        "--store-traces",
        action="store_true",
        default=None,
        help="dump one CSV per trajectory",
    )

    orc = sub.add_parser("oracles", help="exact enumeration and identity suites")
    _add_common(orc)
    orc.add_argument(
        "--chain-count", type=int, help="random dependent chains to enumerate"
    )
    orc.add_argument(
        "--probe-count", type=int, help="random probes for the ratio check"
    )

    cmp_ = sub.add_parser(
        "compare-concentration",
        help="tabulate the two martingale tail bounds across range profiles",
    )
    _add_common(cmp_)
    cmp_.add_argument("--walk-trials", type=int, help="simulated walks per profile")
    cmp_.add_argument(
        "--walk-steps", type=int, help="base step count (the grid scales it 1/4x to 16x)"
    )
    return parser


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {"mode": args.mode}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        known = {f.name for f in dataclass_fields(ExperimentConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        loaded.pop("mode", None)  # the subcommand owns the mode
        values.update(loaded)
    for f in dataclass_fields(ExperimentConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            values[f.name] = flag_value
    if values.get("means") is not None:
        values["means"] = tuple(float(m) for m in values["means"])
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        cfg.validate()
    except (TypeError, ValueError, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    result = _RUNNERS[cfg.mode](cfg)
    if cfg.mode == "oracles" and not result.passed:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

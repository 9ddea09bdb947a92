"""``bso-sim`` command line.

Exit codes: 0 success, 1 validation failure, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import PRESETS, ConfigError, errors, load_config, validate
from .core import FieldParams, IntegrationError, ValidationError
from .dynamics import IntegratorConfig, integrate
from .experiments import run

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2
NORM_TOL = 1e-9


def _report(violations) -> None:
    for v in violations:
        print(v, file=sys.stderr)


def _maybe_plot(args, directory) -> None:
    if args.plot:
        from .plotting import plot_directory

        for path in plot_directory(directory):
            print(path)


def cmd_run(args) -> int:
    config = load_config(args.config)
    violations = validate(config)
    _report(violations)
    if errors(violations):
        return EXIT_INVALID
    out_dir = Path(args.out) if args.out else None
    for path in run(config, out_dir):
        print(path)
    _maybe_plot(args, out_dir or Path(config.output_path).parent)
    return EXIT_OK


def cmd_validate(args) -> int:
    violations = validate(load_config(args.config))
    _report(violations)
    if errors(violations):
        return EXIT_INVALID
    print("ok" if not violations else f"ok with {len(violations)} warning(s)")
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.list or args.name is None:
        for name, configs in PRESETS.items():
            print(f"{name}: {', '.join(c.output_path for c in configs)}")
        return EXIT_OK
    if args.name not in PRESETS:
        print(f"unknown preset {args.name!r}; choose from {', '.join(PRESETS)}", file=sys.stderr)
        return EXIT_INVALID
    if not args.out:
        print("preset needs --out <dir>", file=sys.stderr)
        return EXIT_INVALID
    configs = PRESETS[args.name]
    for config in configs:
        violations = validate(config)
        _report(violations)
        if errors(violations):
            return EXIT_INVALID
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"preset": args.name, "runs": [c.to_dict() for c in configs]}
    (out_dir / "preset.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for config in configs:
        for path in run(config, out_dir):
            print(path)
    _maybe_plot(args, out_dir)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import plot_directory

    written = plot_directory(args.directory)
    if not written:
        print(f"no recognised CSV tables in {args.directory}", file=sys.stderr)
        return EXIT_INVALID
    for path in written:
        print(path)
    return EXIT_OK


def cmd_check(args) -> int:
    """Randomised unitarity check of the exact integrator."""
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.count):
        omega = rng.uniform(0.5, 3.0)
        params = FieldParams(
            g0_max=4 * omega * rng.uniform(0.0, 0.2),
            omega=omega,
            phi=rng.uniform(0, 2 * math.pi),
            tau_sw=rng.uniform(10, 100) / omega,
        )
        series = integrate(params, args.t_end / omega, cfg=IntegratorConfig())
        worst = max(worst, float(series.norm_defect.max()))
    print(f"max norm defect over {args.count} draws (seed {args.seed}): {worst:.3e}")
    return EXIT_OK if worst <= NORM_TOL else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bso-sim", description="Non-RWA two-level dynamics and Bloch-Siegert oscillations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiment described by a JSON config")
    p.add_argument("config")
    p.add_argument("--out", help="directory that output_path is resolved against")
    p.add_argument("--plot", action="store_true", help="also render PNG figures from the CSV output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check a JSON config without running it")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("preset", help="run a named preset")
    p.add_argument("name", nargs="?")
    p.add_argument("--out", help="output directory")
    p.add_argument("--list", action="store_true", help="list presets and their files")
    p.add_argument("--plot", action="store_true", help="also render PNG figures")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("plot", help="render PNG figures for the CSV tables in a directory")
    p.add_argument("directory")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("check", help="randomised norm-conservation check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--t-end", type=float, default=100.0, help="end time in units of 1/omega")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

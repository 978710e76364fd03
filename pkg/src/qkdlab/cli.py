"""Command-line harness.

Three subcommands: ``run`` executes a config file (sweep or single
point), ``sweep`` is a flag-driven shortcut for the standard beta_b
sweep, and ``keyrate`` is a standalone key-rate calculator.  Exit codes:
0 success, 2 configuration error, 3 estimation or domain error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ExperimentConfig, SweepSpec, load_config
from .errors import ConfigurationError, DomainError, EstimationError
from .output import emit_csv, emit_svg, row_values
from .qcore import Basis
from .secanalysis import QberRecord, key_rate_mdi, key_rate_rfi
from .simkit import MenuMode, SimMode
from .sweep import evaluate_point, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ESTIMATION = 3


def _g(value: float) -> str:
    return format(value, ".12g")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdlab",
        description="Simulator and security analysis for relay-based QKD "
        "under reference-frame rotation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the experiment described by a config file")
    run.add_argument("--config", required=True, help="path to a YAML config document")
    run.add_argument("--seed", type=int, default=None, help="override sim.seed")
    run.add_argument("--out", default=None, help="override output.directory")
    run.add_argument("--workers", type=int, default=1, help="sweep worker threads")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="sweep beta_b over [0, 2*pi) with fixed beta_a")
    sweep.add_argument("--beta-a", type=float, required=True, help="Alice frame angle (rad)")
    sweep.add_argument("--points", type=int, required=True, help="number of beta_b samples")
    sweep.add_argument("--mode", choices=["analytic", "montecarlo"], default="analytic")
    sweep.add_argument("--shots", type=int, default=100_000, help="rounds per setting")
    sweep.add_argument(
        "--alice-menu", choices=["six", "four", "two", "one"], default="six",
        help="Alice's state menu (Bob always sends the full six)",
    )
    sweep.add_argument("--out", default=".", help="output directory")
    sweep.add_argument("--seed", type=int, default=0, help="master seed")
    sweep.add_argument("--workers", type=int, default=1, help="worker threads")
    sweep.set_defaults(func=cmd_sweep)

    keyrate = sub.add_parser("keyrate", help="standalone secret-key-rate calculator")
    keyrate.add_argument("--qz", type=float, required=True, help="Z-basis QBER")
    keyrate.add_argument("--c", type=float, required=True, help="check parameter C")
    keyrate.add_argument("--qx", type=float, default=None, help="X-basis QBER (adds r_mdi)")
    keyrate.set_defaults(func=cmd_keyrate)

    return parser


def _emit_outputs(config: ExperimentConfig, rows, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"sweep_betaA_{format(config.beta_a, '.6g')}.csv"
    emit_csv(rows, csv_path)
    print(f"wrote {csv_path}")
    if config.emit_svg:
        for path in emit_svg(rows, out_dir):
            print(f"wrote {path}")


def _print_point(row) -> None:
    values = row_values(row)
    for name in (
        "beta_a", "beta_b",
        "exp_zz", "exp_xx", "exp_xy", "exp_yx", "exp_yy",
        "q_z_raw", "q_x_raw", "q_y_raw",
        "c44", "c24", "c14",
        "r_mdi_raw", "r_rfi44", "r_rfi24", "r_rfi14",
    ):
        value = values[name]
        print(f"{name:10s} = {'' if value is None else _g(value)}")


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out_dir = Path(args.out)
    if config.sweep is not None:
        rows = run_sweep(config, workers=args.workers)
        _emit_outputs(config, rows, config.out_dir)
    else:
        _print_point(evaluate_point(config, config.beta_b))
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = ExperimentConfig(
        beta_a=args.beta_a,
        sweep=SweepSpec(points=args.points),
        mode=SimMode.parse(args.mode),
        shots=args.shots,
        seed=args.seed,
        alice_menu=MenuMode.parse(args.alice_menu),
        out_dir=Path(args.out),
    )
    if config.mode is SimMode.MONTECARLO and config.shots < 1:
        raise ConfigurationError("--shots must be at least 1 in montecarlo mode")
    rows = run_sweep(config, workers=args.workers)
    _emit_outputs(config, rows, config.out_dir)
    return EXIT_OK


def cmd_keyrate(args) -> int:
    q_z = QberRecord.from_raw(Basis.Z, args.qz)
    breakdown = key_rate_rfi(q_z, args.c)
    print(f"u         = {_g(breakdown.u)}")
    print(f"v         = {_g(breakdown.v)}")
    print(f"i_e       = {_g(breakdown.i_e)}")
    print(f"r_rfi_raw = {_g(breakdown.r_raw)}")
    print(f"r_rfi     = {_g(breakdown.r)}")
    if args.qx is not None:
        q_x = QberRecord.from_raw(Basis.X, args.qx)
        r_mdi_raw = key_rate_mdi(q_x, q_z)
        print(f"r_mdi_raw = {_g(r_mdi_raw)}")
        print(f"r_mdi     = {_g(max(0.0, r_mdi_raw))}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line driver: single runs, convergence and scaling studies, communication audits."""

import argparse
import sys

from slidingdg.driver import (
    PRESETS,
    RunConfig,
    convergence_study,
    load_config,
    run_audit,
    run_case,
    scaling_study,
    setup_logfire,
)
from slidingdg.errors import SlidingDGError
from slidingdg.logger import get_logger, set_log_level

logger = get_logger(__name__)

EXIT_FAILURE = 1
EXIT_AUDIT_FAILED = 2


def _int_list(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(item) for item in value.split(",") if item.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got {value}") from e


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Config from --config or a preset --case, with the command line overrides applied."""
    if args.config:
        config = load_config(args.config)
    else:
        config = PRESETS[args.case]()
    return config.with_overrides(n_ranks=args.ranks, backend=args.backend, output_dir=args.out)


def run_command(args: argparse.Namespace) -> bool:
    result = run_case(load_run_config(args))
    report = result.report
    logger.info(
        f"L2(rho)={report.norms['L2_rho']:.6e} Linf(rho)={report.norms['Linf_rho']:.6e} "
        f"mass drift={report.drift['drift_rho']:.3e} energy drift={report.drift['drift_rhoe']:.3e}"
    )
    return True


def converge_command(args: argparse.Namespace) -> bool:
    table = convergence_study(load_run_config(args), levels=args.levels, degrees=args.degrees)
    return not table.empty


def scale_command(args: argparse.Namespace) -> bool:
    scaling_study(load_run_config(args), rank_list=args.rank_list, repeats=args.repeats, n_steps=args.steps)
    return True


def audit_command(args: argparse.Namespace) -> bool:
    return run_audit(load_run_config(args)).passed


def _add_common(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=str, help="Path to an INI run configuration")
    source.add_argument("--case", choices=sorted(PRESETS), help="Run a built-in preset case")
    parser.add_argument("--ranks", type=int, help="Number of ranks (default: from the config)")
    parser.add_argument(
        "--backend", choices=["inproc", "proc"], help="Rank transport: threads or processes"
    )
    parser.add_argument(
        "--out", type=str, help="Output directory (default: SLIDINGDG_OUTPUT_DIR or results)"
    )


def main():
    """Main CLI entry point."""
    parser = argparse.ArgumentParser(description="Sliding mesh DGSEM solver")
    parser.add_argument(
        "--log-level", choices=["debug", "info", "warning", "error"], help="Override LOG_LEVEL"
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    run_parser = subparsers.add_parser("run", help="Run one case and write its error report")
    _add_common(run_parser)

    converge_parser = subparsers.add_parser(
        "converge", help="Refinement study with observed orders of accuracy"
    )
    _add_common(converge_parser)
    converge_parser.add_argument(
        "--levels", type=_int_list, help="Comma-separated refinement factors, e.g. 1,2,4"
    )
    converge_parser.add_argument(
        "--degrees", type=_int_list, help="Comma-separated polynomial degrees, e.g. 2,3,4,5"
    )

    scale_parser = subparsers.add_parser("scale", help="PID table over rank counts")
    _add_common(scale_parser)
    scale_parser.add_argument("--rank-list", type=_int_list, help="Comma-separated rank counts")
    scale_parser.add_argument("--repeats", type=int, help="Repetitions per rank count")
    scale_parser.add_argument("--steps", type=int, help="Time steps per run")

    audit_parser = subparsers.add_parser(
        "audit", help="Traced multi-rank run checked against the rank maps"
    )
    _add_common(audit_parser)

    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        return

    commands = {
        "run": run_command,
        "converge": converge_command,
        "scale": scale_command,
        "audit": audit_command,
    }
    if args.log_level:
        set_log_level(args.log_level)
    setup_logfire()
    try:
        success = commands[args.command](args)
    except SlidingDGError as e:
        logger.error(f"{args.command} failed: {e}")
        sys.exit(EXIT_FAILURE)
    except Exception as e:
        logger.error(f"Unexpected error during {args.command}: {e}")
        sys.exit(EXIT_FAILURE)

    if not success:
        sys.exit(EXIT_AUDIT_FAILED if args.command == "audit" else EXIT_FAILURE)


if __name__ == "__main__":
    main()

"""Argument parser of the implylp command line."""

import argparse
from pathlib import Path

from src import __version__


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("general")
    group.add_argument("--config", type=Path, help="JSON file with the same keys as the flags")
    group.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR (env IMPLYLP_LOG_LEVEL)")
    group.add_argument("--jobs", type=int, help="Worker threads (env IMPLYLP_JOBS)")
    group.add_argument("--seed", type=int, help="PRNG seed (env IMPLYLP_SEED)")
    group.add_argument("--out", type=Path, help="Output path; .json/.csv suffixes are added per --format")
    group.add_argument("--format", choices=("json", "csv", "both"), help="Report formats to write (default both)")
    return parent


def _solve_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("relaxation")
    group.add_argument("--bounds", choices=("interval", "lp"), help="Neuron bound method (env IMPLYLP_BOUNDS)")
    group.add_argument("--feas-tol", dest="feas_tol", type=float, help="Solver feasibility tolerance")
    group.add_argument("--decision-tol", dest="decision_tol", type=float,
                       help="Largest shortfall of a bound below the threshold still accepted (env IMPLYLP_DECISION_TOL)")
    group.add_argument("--export-lp", dest="export_lp", type=Path, metavar="DIR",
                       help="Write every solved program to DIR in LP format")
    group.add_argument("--domain", type=float, nargs=2, metavar=("LOW", "HIGH"),
                       help="Clip every region to the input domain [LOW, HIGH]")
    return parent


def _pair_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("inputs")
    group.add_argument("--net1", type=Path, help="Candidate implied network (NetworkFile JSON)")
    group.add_argument("--net2", type=Path, help="Candidate implier (NetworkFile JSON)")
    group.add_argument("--samples", type=Path, help="SampleFile JSON")
    group.add_argument("--delta", type=float, action="append", help="Region radius (repeatable)")
    group.add_argument("--allow-misclassified", dest="allow_misclassified", action="store_const", const=True,
                       help="Also verify samples misclassified at the center")
    return parent


def _decision_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threshold", type=float, help="Decision threshold on lower bounds (default 0)")
    parser.add_argument("--variant", choices=("margin", "pure"), help="Joint program variant (default margin)")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per operation; unset flags stay ``None``."""
    common, solve, pair = _common_parent(), _solve_parent(), _pair_parent()

    parser = argparse.ArgumentParser(
        prog="implylp",
        description="Differential verification of compatible neural networks with LP relaxations",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    verify = commands.add_parser("verify", parents=[common, solve, pair], help="Check net2 => net1 per sample")
    _decision_flags(verify)
    verify.add_argument("--full-matrix", dest="full_matrix", action="store_const", const=True,
                        help="Bound every ordered class pair, not only those against the label")

    sweep = commands.add_parser("sweep", parents=[common, solve, pair], help="Verify at several radii")
    _decision_flags(sweep)

    commands.add_parser("compare", parents=[common, solve, pair], help="Joint versus independent bounds")

    certify = commands.add_parser("certify", parents=[common, solve], help="Certified robustness per network")
    certify.add_argument("--net", dest="nets", type=Path, action="append", help="Network file (repeatable)")
    certify.add_argument("--samples", type=Path, help="SampleFile JSON")
    certify.add_argument("--delta", type=float, action="append", help="Region radius")

    compact = commands.add_parser("compact", parents=[common], help="Prune or quantize a network")
    compact.add_argument("--net", type=Path, help="Source network file")
    compact.add_argument("--prune", type=float, help="Magnitude pruning fraction in [0, 1]")
    compact.add_argument("--quantize", help="float16, int16, int8 or int4")
    compact.add_argument("--scope", choices=("joint", "separate"), help="Pruning threshold scope (default joint)")

    audit = commands.add_parser("audit", parents=[common, solve], help="Randomized property audit")
    audit.add_argument("--trials", type=int, help="Number of seeded instances (default 100)")
    audit.add_argument("--delta", type=float, action="append", help="Radius to audit (repeatable)")
    audit.add_argument("--samples-per-instance", dest="samples_per_instance", type=int,
                       help="Oracle samples per region (default 10000)")
    audit.add_argument("--inject-fault", dest="inject_fault", choices=("triangle-intercept",),
                       help="Negative control: corrupt the relaxation")

    fixture = commands.add_parser("fixture", parents=[common], help="Write demo networks and samples")
    fixture.add_argument("--kind", choices=("demo", "random", "uniform"), help="Scenario (default demo)")
    fixture.add_argument("--out-dir", dest="out_dir", type=Path, help="Directory for the generated files")
    fixture.add_argument("--count", type=int, help="Number of networks for the random scenario")
    return parser

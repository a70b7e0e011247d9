"""
Command implementations and exit-code mapping of the implylp CLI.

Commands call the use cases directly and assemble every output file once
the work is done. Results go to stdout, logs to stderr.
"""

import asyncio
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from src.adapters.cli.config import (
    AuditConfig,
    CertifyConfig,
    CompactConfig,
    CompareConfig,
    FixtureConfig,
    PairConfig,
    RunConfig,
    SolveConfig,
    SweepConfig,
    VerifyConfig,
    build_config,
)
from src.adapters.cli.parser import build_parser
from src.adapters.dependency_injection.container import (
    build_solver,
    build_verifier,
    build_verifier_options,
    get_network_repository,
    get_report_repository,
)
from src.core.domain_services.oracle import FixtureKind, make_fixture
from src.core.entities.linear_program import ProblemVariant
from src.core.entities.quantization import PruneScope, QuantScheme
from src.core.exceptions import ClassIndexError, ConfigurationError, ImplyLPError, RegionError
from src.core.interfaces.lp_solver import SolverError
from src.core.interfaces.network_repository import NetworkLoadError, Sample
from src.core.interfaces.report_repository import ReportWriteError
from src.core.use_cases.certify_robustness import CertifyRobustnessUseCase
from src.core.use_cases.compact_network import CompactNetworkUseCase
from src.core.use_cases.compare_analyses import COMPARISON_COLUMNS, CompareAnalysesUseCase
from src.core.use_cases.run_audit import AuditOptions, RunAuditUseCase
from src.core.use_cases.sweep_deltas import SWEEP_COLUMNS, SweepDeltasUseCase
from src.core.use_cases.verify_implication import SUMMARY_COLUMNS, VerifyImplicationUseCase
from src.infrastructure.config import get_settings
from src.infrastructure.solvers.lp_writer import LpExporter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_LOAD = 3
EXIT_SOLVER = 4
EXIT_AUDIT = 5

CONFIG_MODELS = {
    "verify": VerifyConfig,
    "sweep": SweepConfig,
    "compare": CompareConfig,
    "certify": CertifyConfig,
    "compact": CompactConfig,
    "audit": AuditConfig,
    "fixture": FixtureConfig,
}


def exit_code_for(error: Exception) -> int:
    """Exit code of a failed command."""
    if isinstance(error, (ConfigurationError, RegionError, ClassIndexError)):
        return EXIT_CONFIG
    if isinstance(error, SolverError):
        return EXIT_SOLVER
    if isinstance(error, (NetworkLoadError, ReportWriteError, ImplyLPError)):
        return EXIT_LOAD
    return 1


def configure_logging(level: Optional[str]) -> None:
    """Configure the root logger once per invocation; logs go to stderr."""
    resolved = getattr(logging, str(level or "INFO").upper(), logging.INFO)
    logging.basicConfig(
        level=resolved,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _percent(part: int, whole: int) -> str:
    return f"{part}/{whole} ({100.0 * part / whole:.1f}%)" if whole else "0/0 (n/a)"


class ImplyLPCommands:
    """The implylp subcommands; each returns a process exit code."""

    def __init__(self):
        self._settings = get_settings()
        self._networks = get_network_repository()
        self._reports = get_report_repository()

    # Wiring

    def _verifier(self, config: SolveConfig):
        sink = LpExporter(config.export_lp) if config.export_lp is not None else None
        return build_verifier(
            self._settings, bound_method=config.bounds, feas_tol=config.feas_tol,
            lp_sink=sink, decision_tol=config.decision_tol,
        )

    def _load_pair(self, config: PairConfig):
        net1 = self._networks.load_network(config.net1)
        net2 = self._networks.load_network(config.net2)
        samples = self._networks.load_samples(config.samples, num_classes=net1.num_classes)
        return net1, net2, samples

    def _write(
        self, config: RunConfig, command: str, payload: Dict[str, Any],
        rows: List[Dict[str, Any]], columns: Sequence[str],
    ) -> None:
        if config.format in ("json", "both"):
            path = config.output_path(command, "json")
            self._reports.write_json(payload, path)
            print(f"Wrote {path}")
        if config.format in ("csv", "both"):
            path = config.output_path(command, "csv")
            self._reports.write_csv(rows, columns, path)
            print(f"Wrote {path}")

    # Commands

    async def cmd_verify(self, config: VerifyConfig) -> int:
        net1, net2, samples = self._load_pair(config)
        use_case = VerifyImplicationUseCase(self._verifier(config), jobs=config.jobs)
        run = await use_case.execute(
            net1, net2, samples, config.delta[0],
            threshold=config.threshold,
            variant=ProblemVariant(config.variant),
            allow_misclassified=config.allow_misclassified,
            full_matrix=config.full_matrix,
            domain=config.domain,
        )
        payload = {"command": "verify", "net1": net1.name, "net2": net2.name, **run.to_dict()}
        self._write(config, "verify", payload, run.summary_rows(), SUMMARY_COLUMNS)

        verified = len(run.verified)
        reverse = sum(r.reverse_implied for r in run.verified)
        print(f"{net2.name} => {net1.name}: established on {_percent(run.implied_count, verified)}")
        print(f"{net1.name} => {net2.name}: established on {_percent(reverse, verified)}")
        if verified < len(run.reports):
            print(f"Skipped {len(run.reports) - verified} misclassified sample(s)")
        return EXIT_OK

    async def cmd_sweep(self, config: SweepConfig) -> int:
        net1, net2, samples = self._load_pair(config)
        use_case = SweepDeltasUseCase(VerifyImplicationUseCase(self._verifier(config), jobs=config.jobs))
        sweep = await use_case.execute(
            net1, net2, samples, config.delta,
            threshold=config.threshold,
            variant=ProblemVariant(config.variant),
            allow_misclassified=config.allow_misclassified,
            domain=config.domain,
        )
        payload = {"command": "sweep", "net1": net1.name, "net2": net2.name, **sweep.to_dict()}
        self._write(config, "sweep", payload, sweep.rows(), SWEEP_COLUMNS)

        for run in sweep.runs:
            print(f"delta={run.delta:g}: implied {run.implied_pct:.1f}%, reverse {run.reverse_pct:.1f}%")
        if not sweep.monotone:
            print("Warning: implied count is not monotone in delta")
        return EXIT_OK

    async def cmd_compare(self, config: CompareConfig) -> int:
        net1, net2, samples = self._load_pair(config)
        use_case = CompareAnalysesUseCase(self._verifier(config), jobs=config.jobs)
        run = await use_case.execute(
            net1, net2, samples, config.delta[0],
            allow_misclassified=config.allow_misclassified,
            domain=config.domain,
        )
        payload = {"command": "compare", "net1": net1.name, "net2": net2.name, **run.to_dict()}
        self._write(config, "compare", payload, [row.to_row() for row in run.rows], ("id", "i", "j", *COMPARISON_COLUMNS))

        aggregate = payload["aggregate"]
        for column in COMPARISON_COLUMNS:
            stats = aggregate[column]
            if stats["mean"] is None:
                print(f"{column:>16}: n/a")
            else:
                print(f"{column:>16}: {stats['mean']:.6g} +- {stats['std']:.6g}")
        return EXIT_OK

    async def cmd_certify(self, config: CertifyConfig) -> int:
        networks = [self._networks.load_network(path) for path in config.nets]
        names = [net.name for net in networks]
        if len(set(names)) != len(names):
            networks = [net.with_layers(net.layers, name=f"{net.name}#{k}") for k, net in enumerate(networks, 1)]
        samples = self._networks.load_samples(config.samples, num_classes=networks[0].num_classes)
        use_case = CertifyRobustnessUseCase(self._verifier(config), jobs=config.jobs)
        run = await use_case.execute(networks, samples, config.delta[0], domain=config.domain)

        rows = [
            {"network": name, "id": r.sample_id, "delta": r.delta, "label": r.label, "certified": r.certified}
            for name, reports in run.reports.items()
            for r in reports
        ]
        self._write(config, "certify", {"command": "certify", **run.to_dict()}, rows,
                    ("network", "id", "delta", "label", "certified"))
        for net in networks:
            print(f"{net.name}: certified on {run.certified_pct(net.name):.1f}% of samples")
        return EXIT_OK

    async def cmd_compact(self, config: CompactConfig) -> int:
        network = self._networks.load_network(config.net)
        scheme = QuantScheme.parse(config.quantize) if config.quantize is not None else None
        compact, summary = await CompactNetworkUseCase().execute(
            network, prune=config.prune, scheme=scheme, scope=PruneScope(config.scope)
        )
        self._networks.save_network(compact, config.out)
        print(json.dumps({"output": str(config.out), **summary}, indent=2))
        return EXIT_OK

    async def cmd_audit(self, config: AuditConfig) -> int:
        options = AuditOptions(
            trials=config.trials,
            seed=config.seed,
            deltas=tuple(config.delta),
            samples_per_instance=config.samples_per_instance,
            inject_fault=config.inject_fault is not None,
        )
        use_case = RunAuditUseCase(
            build_solver(self._settings, config.feas_tol),
            build_verifier_options(self._settings, config.bounds, decision_tol=config.decision_tol),
            jobs=config.jobs,
        )
        report = await use_case.execute(options)
        payload = report.to_dict()
        path = config.output_path("audit", "json")
        self._reports.write_json(payload, path)
        print(f"Wrote {path}")

        transitivity = payload["transitivity"]
        print(f"Checks: {payload['checks']}")
        print(
            f"Transitivity: {len(transitivity['positive_adjacent_cases'])} positive chains, "
            f"{transitivity['disagreements']} disagreement(s)"
        )
        if report.passed:
            print(f"Audit passed (seed {options.seed}, {options.trials} trials)")
            return EXIT_OK
        logger.error(f"Audit failed with {len(report.violations)} violation(s), seed {options.seed}")
        print(f"Audit FAILED (seed {options.seed}): {len(report.violations)} violation(s)")
        for violation in report.violations:
            print(json.dumps(violation.to_dict(), sort_keys=True))
        return EXIT_AUDIT

    async def cmd_fixture(self, config: FixtureConfig) -> int:
        fixture = make_fixture(FixtureKind(config.kind), seed=config.seed, count=config.count)
        config.out_dir.mkdir(parents=True, exist_ok=True)
        for index, net in enumerate(fixture.networks, start=1):
            path = config.out_dir / f"net{index}.json"
            self._networks.save_network(net, path)
            print(f"Wrote {path} ({net.name})")
        samples_path = config.out_dir / "samples.json"
        self._networks.save_samples(
            [Sample(id="center", values=fixture.center, label=fixture.label)],
            samples_path,
            num_classes=fixture.networks[0].num_classes,
        )
        print(f"Wrote {samples_path} (delta {fixture.delta:g})")
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the implylp command line.

    Returns:
        0 on success, 2 for configuration errors, 3 for load errors, 4 for
        hard solver failures, 5 for audit violations
    """
    args = build_parser().parse_args(argv)
    flags = {key: value for key, value in vars(args).items() if key not in ("command", "config")}
    configure_logging(flags.get("log_level"))

    try:
        settings = get_settings()
        config = build_config(CONFIG_MODELS[args.command], flags, settings, args.config)
        configure_logging(config.log_level)
        commands = ImplyLPCommands()
        handler: Callable = getattr(commands, f"cmd_{args.command}")
        return asyncio.run(handler(config))
    except (ImplyLPError, NetworkLoadError, SolverError, ReportWriteError) as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return code

"""
Run orchestration for CLI commands.

Each command runs as a three-node pipeline: compute fills a RunContext, verify
checks every reduced state it produced against the trace, hermiticity and
impurity identities, and emit writes the CSV tables. A failing node stops the
pipeline before anything reaches disk.
"""

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Optional

from dressed_cavity import metrics
from dressed_cavity.commands import COMMANDS
from dressed_cavity.commands.context import RunContext
from dressed_cavity.csv_output import STDOUT, write_csv
from dressed_cavity.errors import EXIT_NUMERICAL, EXIT_OK, CavityError, ContractViolation
from dressed_cavity.evolution import impurity_identity_check
from dressed_cavity.models.schemas import RunSpec
from dressed_cavity.pipeline import PipelineOrchestrator, first_failure
from dressed_cavity.settings import Settings, get_settings

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    command: str
    rows_emitted: int = 0
    max_defect: float = 0.0
    warnings: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    status: str = "success"
    error: Optional[CavityError] = None
    exit_code: int = EXIT_OK


def compute_node(context: RunContext) -> None:
    COMMANDS[context.spec.command](context)


def verify_states(context: RunContext) -> None:
    tol = context.spec.tolerances.identity
    for state, superposition in context.checked_states:
        trace = abs(state.rho00 + state.rho11 - 1.0)
        hermiticity = abs(state.rho10 - state.rho01.conjugate())
        population, purity = impurity_identity_check(state, superposition)
        defect = max(trace, hermiticity, population, purity)
        context.observe_defect(defect)
        if defect > tol:
            raise ContractViolation(
                f"reduced state at t={state.t:.17g} breaks an identity by {defect:.3e}",
                module="runner",
                trace=trace,
                hermiticity=hermiticity,
                population=population,
                purity=purity,
            )


def emit_outputs(context: RunContext) -> None:
    written: list[str] = []
    try:
        for extra in context.extra_outputs:
            write_csv(extra.path, extra.header, extra.rows)
            if extra.path not in (None, STDOUT):
                written.append(extra.path)
        if context.table is not None:
            context.rows_emitted = write_csv(
                context.spec.output_path,
                context.table.header,
                context.table.rows,
                meta=context.spec.meta(),
            )
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                logger.warning("could not remove partial output %s", path)
        raise


def build_pipeline(command: str) -> PipelineOrchestrator:
    orchestrator = PipelineOrchestrator(name=command)
    orchestrator.register_node("compute", compute_node)
    orchestrator.register_node("verify", verify_states)
    orchestrator.register_node("emit", emit_outputs)
    orchestrator.register_edge("compute", "verify")
    orchestrator.register_edge("verify", "emit")
    return orchestrator


def run(spec: RunSpec, settings: Optional[Settings] = None) -> RunReport:
    """Execute one command; failures are reported in the RunReport, never raised."""
    settings = settings or get_settings()
    context = RunContext(spec=spec, settings=settings)
    report = RunReport(command=spec.command)

    start = time.perf_counter()
    results = build_pipeline(spec.command).execute_pipeline("compute", context=context)
    report.wall_time = time.perf_counter() - start

    failure = first_failure(results)
    if failure is not None:
        error = failure.error
        if not isinstance(error, CavityError):
            error = CavityError(
                f"unexpected {type(error).__name__}: {error}", node=failure.node_name
            )
            error.exit_code = EXIT_NUMERICAL
        report.status = "failure"
        report.error = error
        report.exit_code = error.exit_code

    report.rows_emitted = context.rows_emitted
    report.max_defect = context.max_defect
    report.warnings = list(context.warnings)

    metrics.record_run(
        spec.command, report.status, report.wall_time, report.rows_emitted, report.max_defect
    )
    metrics_file = spec.metrics_file or settings.metrics_file
    if metrics_file:
        try:
            metrics.export(metrics_file)
        except OSError as e:
            report.warnings.append(f"metrics export failed: {e}")
            logger.warning("metrics export to %s failed: %s", metrics_file, e)

    logger.info(
        "%s finished: status=%s rows=%d max_defect=%.3e wall=%.3fs",
        spec.command,
        report.status,
        report.rows_emitted,
        report.max_defect,
        report.wall_time,
    )
    return report

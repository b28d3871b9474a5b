"""
Prometheus metrics for CLI runs.

A private registry keeps library imports free of global collector state; the
registry is written in text exposition format when a metrics file is configured.
"""

import logging

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

REGISTRY = CollectorRegistry()

runs_counter = Counter(
    "dressed_cavity_runs_total",
    "Total number of CLI runs",
    ["command", "status"],
    registry=REGISTRY,
)

run_duration = Histogram(
    "dressed_cavity_run_duration_seconds",
    "Wall time of CLI runs",
    ["command"],
    buckets=[0.1, 0.5, 1.0, 5.0, 15.0, 60.0, 300.0],
    registry=REGISTRY,
)

rows_gauge = Gauge(
    "dressed_cavity_rows_emitted", "Rows written by the last run", ["command"], registry=REGISTRY
)

defect_gauge = Gauge(
    "dressed_cavity_max_invariant_defect",
    "Largest invariant defect observed in the last run",
    ["command"],
    registry=REGISTRY,
)


def record_run(command: str, status: str, wall_time: float, rows: int, max_defect: float) -> None:
    runs_counter.labels(command=command, status=status).inc()
    run_duration.labels(command=command).observe(wall_time)
    rows_gauge.labels(command=command).set(rows)
    defect_gauge.labels(command=command).set(max_defect)


def export(path: str) -> None:
    write_to_textfile(path, REGISTRY)
    logger.info("metrics written to %s", path)

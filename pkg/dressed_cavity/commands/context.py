import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from dressed_cavity.errors import UsageError
from dressed_cavity.evolution import (
    ReducedState,
    SurvivalAmplitude,
    reduced_density,
)
from dressed_cavity.models.schemas import CavityConfig, RunSpec, SuperpositionSpec
from dressed_cavity.settings import Settings

logger = logging.getLogger("dressed_cavity.runner")

EVOLUTION_HEADER = [
    "t",
    "re_f00",
    "im_f00",
    "abs2_f00",
    "rho00",
    "rho11",
    "re_rho10",
    "im_rho10",
    "impurity",
    "method",
]

LEAKAGE_WARNING = 1e-4


@dataclass
class OutputTable:
    header: list[str]
    rows: Iterable[Sequence[Any]]
    path: Optional[str] = None


@dataclass
class RunContext:
    """Mutable state shared by the compute, verify and emit nodes of one run."""

    spec: RunSpec
    settings: Settings
    table: Optional[OutputTable] = None
    extra_outputs: list[OutputTable] = field(default_factory=list)
    checked_states: list[tuple[ReducedState, SuperpositionSpec]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    max_defect: float = 0.0
    rows_emitted: int = 0

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings.append(message)
            logger.warning(message)

    def observe_defect(self, value: float) -> None:
        self.max_defect = max(self.max_defect, float(value))

    def require_config(self) -> CavityConfig:
        if self.spec.config is None:
            raise UsageError(
                f"{self.spec.command} needs a cavity: pass --radius or --delta",
                flag="--radius/--delta",
            )
        return self.spec.config

    def check_leakage(self, amplitude: SurvivalAmplitude) -> None:
        if amplitude.leakage_bound > LEAKAGE_WARNING:
            self.warn(
                f"{amplitude.method.value}: truncation leakage {amplitude.leakage_bound:.3e} "
                f"exceeds {LEAKAGE_WARNING:.0e}"
            )


def state_row(state: ReducedState, amplitude: SurvivalAmplitude) -> list[Any]:
    value = amplitude.value
    return [
        state.t,
        value.real,
        value.imag,
        amplitude.probability,
        state.rho00,
        state.rho11,
        state.rho10.real,
        state.rho10.imag,
        state.impurity,
        amplitude.method,
    ]


def evolution_rows(
    context: RunContext, amplitudes: Iterable[SurvivalAmplitude], spec: SuperpositionSpec
) -> list[list[Any]]:
    rows = []
    for amplitude in amplitudes:
        context.check_leakage(amplitude)
        state = reduced_density(amplitude, spec)
        context.checked_states.append((state, spec))
        rows.append(state_row(state, amplitude))
    return rows

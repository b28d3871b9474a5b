"""
Dressed-state amplitudes and the reduced density matrix of the particle.

f_{mu nu}(t) = Sum_s t_mu^s t_nu^s exp(-i Omega_s t). The ground-state energy
phase exp(-i E_0 t) multiplies every amplitude and cancels in every element
of the reduced density matrix, so it is never formed.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from dressed_cavity.coupling import CouplingTable
from dressed_cavity.errors import ContractViolation, UsageError, ValidationError
from dressed_cavity.models.schemas import SuperpositionSpec
from dressed_cavity.spectrum import Spectrum
from dressed_cavity.summation import oscillatory_sum

logger = logging.getLogger(__name__)

CONTRACT_SLACK = 1e-12


class AmplitudeMethod(str, Enum):
    MODE_SUM = "mode_sum"
    CONTINUUM = "continuum"
    SMALL_CAVITY = "small_cavity"
    WEAK_COUPLING = "weak_coupling"
    STRONG_COUPLING = "strong_coupling"


@dataclass(frozen=True)
class SurvivalAmplitude:
    t: float
    value: complex
    method: AmplitudeMethod
    leakage_bound: float = 0.0

    @property
    def probability(self) -> float:
        return self.value.real**2 + self.value.imag**2


@dataclass(frozen=True)
class ReducedState:
    t: float
    rho00: float
    rho11: float
    rho10: complex
    rho01: complex
    impurity: float

    def matrix(self) -> np.ndarray:
        """2x2 matrix in the (ground, excited) basis."""
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    def purity(self) -> float:
        return self.rho00**2 + self.rho11**2 + 2.0 * abs(self.rho10) ** 2

    def determinant(self) -> float:
        return self.rho00 * self.rho11 - abs(self.rho10) ** 2


def _check_time(t: float) -> None:
    if not t >= 0:
        raise ValidationError(f"time must be >= 0, got {t}", module="evolution", t=t)


def f_amplitude(mu: int, nu: int, t: float, table: CouplingTable, spectrum: Spectrum) -> complex:
    """Compensated mode sum for the amplitude from dressed mode mu to nu."""
    _check_time(t)
    weights = table.row(mu) * table.row(nu)
    return oscillatory_sum(weights, spectrum.frequencies, t)


def f00_mode_sum(t: float, table: CouplingTable, spectrum: Spectrum) -> SurvivalAmplitude:
    _check_time(t)
    value = oscillatory_sum(table.t0 * table.t0, spectrum.frequencies, t)
    return SurvivalAmplitude(
        t=float(t),
        value=value,
        method=AmplitudeMethod.MODE_SUM,
        leakage_bound=abs(table.row_defect),
    )


def f00_mode_sum_grid(
    times: Iterable[float], table: CouplingTable, spectrum: Spectrum
) -> list[SurvivalAmplitude]:
    return [f00_mode_sum(float(t), table, spectrum) for t in times]


def reduced_density(f00: SurvivalAmplitude, spec: SuperpositionSpec) -> ReducedState:
    """Reduced state of the particle at f00.t for the superposition spec."""
    x = f00.probability
    if x > 1.0 + f00.leakage_bound + CONTRACT_SLACK:
        raise ContractViolation(
            f"|f00|^2 = {x:.17g} exceeds 1 + leakage",
            module="evolution",
            t=f00.t,
            leakage=f00.leakage_bound,
            method=f00.method.value,
        )
    return state_from_amplitude(f00.t, f00.value, spec)


def state_from_amplitude(t: float, value: complex, spec: SuperpositionSpec) -> ReducedState:
    """Density-matrix elements for an arbitrary amplitude, without the contract check."""
    x = value.real**2 + value.imag**2
    xi = spec.xi
    rho11 = xi * x
    coherence = np.sqrt(xi * (1.0 - xi)) * np.exp(-1j * spec.phi) * value
    return ReducedState(
        t=float(t),
        rho00=1.0 - rho11,
        rho11=rho11,
        rho10=complex(coherence),
        rho01=complex(np.conj(coherence)),
        impurity=2.0 * xi * xi * x * (1.0 - x),
    )


def impurity_identity_check(state: ReducedState, spec: SuperpositionSpec) -> tuple[float, float]:
    """Deviations of D from 2 rho11 (xi - rho11) and from 1 - Tr rho^2."""
    population_form = 2.0 * state.rho11 * (spec.xi - state.rho11)
    trace_form = 1.0 - state.purity()
    return abs(state.impurity - population_form), abs(state.impurity - trace_form)


def evolve_grid(
    times: Iterable[float], table: CouplingTable, spectrum: Spectrum, spec: SuperpositionSpec
) -> list[tuple[SurvivalAmplitude, ReducedState]]:
    results = []
    for t in times:
        amplitude = f00_mode_sum(float(t), table, spectrum)
        results.append((amplitude, reduced_density(amplitude, spec)))
    return results


def probability_sum(
    mu: int, t: float, table: CouplingTable, spectrum: Spectrum, limit: Optional[int] = None
) -> float:
    """Sum_nu |f_{mu nu}(t)|^2 over every represented mode nu."""
    _check_time(t)
    limit = limit or table.dense_limit
    if spectrum.size > limit:
        raise UsageError(
            "probability sum needs the dense matrix; lower the truncation",
            module="evolution",
            modes=spectrum.size,
        )
    matrix = table.rows(range(spectrum.size))
    phases = np.exp(-1j * spectrum.frequencies * t)
    amplitudes = matrix @ (matrix[mu] * phases)
    return float(np.sum(amplitudes.real**2 + amplitudes.imag**2))


def unitarity_defect(mu: int, t: float, table: CouplingTable, spectrum: Spectrum) -> float:
    return abs(1.0 - probability_sum(mu, t, table, spectrum))

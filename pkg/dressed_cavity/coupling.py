"""
Principal-axis transformation matrix of the oscillator-field system.

Column r of the matrix holds (t_0^r, t_1^r, ..., t_K^r). The particle row t_0^r
comes from a closed formula; the field rows follow from

    t_k^r = eta omega_k / (omega_k^2 - Omega_r^2) t_0^r,

with omega_k^2 - Omega_r^2 = delta_omega^2 (k - theta_r)(k + theta_r) built from the
pole-interval offsets of the spectrum so that close resonances keep full precision.
The full matrix has (K+1)^2 entries; rows and columns are generated on demand.
"""

import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import digamma, polygamma

from dressed_cavity.errors import (
    IndexOutOfRange,
    OccupationMismatch,
    OverflowGuard,
    ResonanceDegeneracy,
    UsageError,
    ValidationError,
)
from dressed_cavity.models.schemas import CavityConfig
from dressed_cavity.settings import Settings, get_settings
from dressed_cavity.spectrum import Spectrum
from dressed_cavity.summation import compensated_sum

logger = logging.getLogger(__name__)

MAX_OCCUPATION = 20
_RESONANCE_FLOOR = 1e-15
_SMALL_THETA = 1e-4

Occupations = Union[Sequence[int], Mapping[int, int]]


@dataclass(frozen=True)
class CouplingTable:
    t0: np.ndarray
    eta: float
    omega_bar: float
    delta_omega: float
    spectrum: Spectrum
    column_defects: np.ndarray
    row_defect: float
    keep_eta_term: bool
    dense_limit: int

    @property
    def truncation(self) -> int:
        return self.spectrum.truncation

    def _check_index(self, index: int, name: str) -> None:
        if not 0 <= index <= self.truncation:
            raise IndexOutOfRange(
                f"{name}={index} outside 0..{self.truncation}",
                module="coupling",
                index=index,
                truncation=self.truncation,
            )

    def _gaps(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        offsets = self.spectrum.offsets
        r = np.arange(offsets.size, dtype=float)
        return (k - r) - offsets, k + r + offsets

    def row(self, mu: int) -> np.ndarray:
        """t_mu^s over all normal modes s (mu = 0 is the particle)."""
        self._check_index(mu, "mu")
        if mu == 0:
            return self.t0
        minus, plus = self._gaps(mu)
        relative = np.abs(minus * plus) / float(mu) ** 2
        if np.min(relative) < _RESONANCE_FLOOR:
            raise ResonanceDegeneracy(
                "field mode coincides with a normal mode",
                module="coupling",
                k=mu,
                r=int(np.argmin(relative)),
            )
        return (self.eta / self.delta_omega) * mu * self.t0 / (minus * plus)

    def element(self, mu: int, r: int) -> float:
        self._check_index(r, "r")
        if mu == 0:
            self._check_index(mu, "mu")
            return float(self.t0[r])
        return float(self.row(mu)[r])

    def tk(self, k: int, r: int) -> float:
        if k < 1:
            raise IndexOutOfRange("field index starts at 1", module="coupling", k=k)
        return self.element(k, r)

    def column(self, r: int) -> np.ndarray:
        """(t_0^r, t_1^r, ..., t_K^r)."""
        self._check_index(r, "r")
        theta = self.spectrum.theta[r]
        s = self.spectrum.offsets[r]
        k = np.arange(1, self.truncation + 1, dtype=float)
        minus = (k - r) - s
        plus = k + theta
        field = (self.eta / self.delta_omega) * k * self.t0[r] / (minus * plus)
        return np.concatenate(([self.t0[r]], field))

    def rows(self, indices: Sequence[int]) -> np.ndarray:
        return np.vstack([self.row(int(mu)) for mu in indices])

    def tk_matrix(self) -> np.ndarray:
        """Dense K x (K+1) block of field rows."""
        if self.truncation + 1 > self.dense_limit:
            raise UsageError(
                f"dense matrix of {self.truncation} x {self.truncation + 1} exceeds dense limit",
                module="coupling",
                dense_limit=self.dense_limit,
            )
        return self.rows(range(1, self.truncation + 1))

    def iter_tk_entries(self) -> Iterator[tuple[int, int, float]]:
        """(k, r, t_k^r) row by row without materialising the matrix."""
        for k in range(1, self.truncation + 1):
            for r, value in enumerate(self.row(k)):
                yield k, r, float(value)

    def to_rows(self) -> list[tuple[int, float, float]]:
        return [
            (r, float(t), float(d)) for r, (t, d) in enumerate(zip(self.t0, self.column_defects))
        ]


@dataclass(frozen=True)
class AlphaMatrix:
    indices: tuple[int, ...]
    alpha: np.ndarray


def t0_closed_form(
    frequencies: np.ndarray, omega_bar: float, g: float, eta: float, keep_eta_term: bool = True
) -> np.ndarray:
    omega_sq = frequencies * frequencies
    detuning = omega_sq - omega_bar * omega_bar
    denominator = detuning * detuning + 4.0 * g * g * omega_sq
    if keep_eta_term:
        denominator = denominator + 0.5 * eta * eta * (3.0 * omega_sq - omega_bar * omega_bar)
    return eta * frequencies / np.sqrt(denominator)


def field_tail_sum(theta: np.ndarray, truncation: int) -> np.ndarray:
    """Sum_{k > K} k^2 / (k^2 - theta^2)^2 via digamma and trigamma."""
    theta = np.asarray(theta, dtype=float)
    upper = truncation + 1.0
    trigamma_minus = polygamma(1, upper - theta)
    trigamma_plus = polygamma(1, upper + theta)
    small = theta < _SMALL_THETA
    safe = np.where(small, 1.0, theta)
    quotient = np.where(
        small,
        2.0 * polygamma(1, upper),
        (digamma(upper + safe) - digamma(upper - safe)) / safe,
    )
    return 0.25 * (trigamma_minus + trigamma_plus + quotient)


def build_couplings(
    config: CavityConfig,
    spectrum: Spectrum,
    keep_eta_term: bool = True,
    settings: Optional[Settings] = None,
) -> CouplingTable:
    """Closed-form transformation matrix with per-column truncation defects."""
    settings = settings or get_settings()
    if spectrum.truncation != config.truncation or not math.isclose(
        spectrum.delta_omega, config.delta_omega, rel_tol=1e-12
    ):
        raise ValidationError(
            "spectrum was computed for a different configuration",
            module="coupling",
            spectrum_truncation=spectrum.truncation,
            config_truncation=config.truncation,
        )
    eta = config.eta
    t0 = t0_closed_form(spectrum.frequencies, config.omega_bar, config.g, eta, keep_eta_term)
    if not np.all(np.isfinite(t0)) or np.any(t0 <= 0):
        raise ResonanceDegeneracy(
            "particle row is not finite and positive", module="coupling", g=config.g
        )

    ratio = (eta / config.delta_omega) ** 2
    column_defects = t0 * t0 * ratio * field_tail_sum(spectrum.theta, config.truncation)
    row_defect = 1.0 - compensated_sum((t0 * t0).tolist())

    logger.info(
        "built couplings for %d modes (row defect %.3e, eta term %s)",
        t0.size,
        row_defect,
        "kept" if keep_eta_term else "dropped",
    )
    return CouplingTable(
        t0=t0,
        eta=eta,
        omega_bar=config.omega_bar,
        delta_omega=config.delta_omega,
        spectrum=spectrum,
        column_defects=column_defects,
        row_defect=row_defect,
        keep_eta_term=keep_eta_term,
        dense_limit=settings.dense_limit,
    )


def column_defect_direct(table: CouplingTable, r: int, upper: int) -> float:
    """Truncated tail Sum_{K < k <= upper} (t_k^r)^2 summed term by term."""
    theta = table.spectrum.theta[r]
    k = np.arange(table.truncation + 1, upper + 1, dtype=float)
    terms = k * k / ((k - theta) * (k + theta)) ** 2
    ratio = (table.eta / table.delta_omega) ** 2
    return float(table.t0[r] ** 2 * ratio * compensated_sum(terms[::-1].tolist()))


def t00_squared(table: CouplingTable) -> float:
    return float(table.t0[0] ** 2)


def small_cavity_t00_squared(delta: float) -> float:
    """(t_0^0)^2 from the normalisation condition to first order in delta."""
    return 1.0 / (1.0 + 2.0 * math.pi * delta / 3.0)


def alpha_matrix(
    config: CavityConfig,
    spectrum: Spectrum,
    table: CouplingTable,
    indices: Optional[Sequence[int]] = None,
) -> AlphaMatrix:
    """alpha_{mu nu} = omega_mu^{-1/2} Sum_r t_mu^r t_nu^r Omega_r^{1/2} on a block of modes."""
    if indices is None:
        if spectrum.size > table.dense_limit:
            raise UsageError(
                "pass explicit mode indices for large truncations",
                module="coupling",
                modes=spectrum.size,
            )
        indices = range(spectrum.size)
    indices = tuple(int(mu) for mu in indices)
    block = table.rows(indices)
    bare = np.array([config.omega_bar if mu == 0 else config.field_frequency(mu) for mu in indices])
    weighted = block * np.sqrt(spectrum.frequencies)[None, :]
    alpha = (weighted @ block.T) / np.sqrt(bare)[:, None]
    return AlphaMatrix(indices=indices, alpha=alpha)


def _occupation_items(occupations: Occupations) -> list[tuple[int, int]]:
    if isinstance(occupations, Mapping):
        return sorted((int(r), int(count)) for r, count in occupations.items())
    return [(r, int(count)) for r, count in enumerate(occupations)]


def overlap_coefficient(
    table: CouplingTable,
    mu: int,
    occupations: Occupations,
    expected_total: Optional[int] = None,
) -> float:
    """sqrt(N! / prod l_r!) prod (t_mu^r)^{l_r} for a normal-mode occupation pattern."""
    items = _occupation_items(occupations)
    if any(count < 0 for _, count in items):
        raise OccupationMismatch("occupations must be non-negative", module="coupling")
    total = sum(count for _, count in items)
    if expected_total is not None and total != expected_total:
        raise OccupationMismatch(
            f"occupations sum to {total}, expected {expected_total}",
            module="coupling",
            total=total,
            expected=expected_total,
        )
    if total > MAX_OCCUPATION:
        raise OverflowGuard(
            f"total occupation {total} exceeds {MAX_OCCUPATION}",
            module="coupling",
            total=total,
        )
    occupied = [(r, count) for r, count in items if count > 0]
    if not occupied:
        return 1.0
    row = table.row(mu)
    for r, _ in occupied:
        table._check_index(r, "r")
    multinomial = math.factorial(total) / math.prod(math.factorial(c) for _, c in occupied)
    return math.sqrt(multinomial) * math.prod(float(row[r]) ** count for r, count in occupied)

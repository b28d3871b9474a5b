"""
Small-cavity regime: first-order delta expansion of the couplings and spectrum.

    f00(t) ~ w0 [exp(-i Omega_0 t) + Sum_k a_k exp(-i Omega_k t)],
    w0 = (1 + 2 pi delta / 3)^-1,  a_k = 4 delta / (pi k^2),
    Omega_k = (g / delta)(k + 2 delta / (pi k)).

The weights telescope through zeta(2) = pi^2/6 so that f00(0) = 1 as K -> inf.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import polygamma

from dressed_cavity.continuum import f00_continuum
from dressed_cavity.coupling import build_couplings, small_cavity_t00_squared
from dressed_cavity.errors import ValidationError
from dressed_cavity.evolution import AmplitudeMethod, SurvivalAmplitude
from dressed_cavity.models.schemas import CavityConfig
from dressed_cavity.settings import Settings, get_settings
from dressed_cavity.spectrum import (
    GroundMode,
    check_small_cavity_range,
    ground_condition,
    small_cavity_spectrum,
    solve_spectrum,
)
from dressed_cavity.summation import oscillatory_sum, oscillatory_sum_fast

logger = logging.getLogger(__name__)

_ROW_CHUNK = 256


class Dissipation(str, Enum):
    DISSIPATIVE = "dissipative"
    NONDISSIPATIVE = "nondissipative"


class VerdictBasis(str, Enum):
    ANALYTIC = "analytic"
    ASYMPTOTIC = "asymptotic"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class SmallCavityModel:
    delta: float
    omega_bar: float
    g: float
    truncation: int
    weight0: float
    mode_weights: np.ndarray
    frequencies: np.ndarray
    ground_mode: GroundMode
    ground_condition_met: bool
    warnings: tuple[str, ...] = ()

    @classmethod
    def from_config(
        cls,
        config: CavityConfig,
        ground_mode: GroundMode = GroundMode.PRINTED,
        enforce_ground: bool = True,
        settings: Optional[Settings] = None,
        delta_max: Optional[float] = None,
    ) -> "SmallCavityModel":
        settings = settings or get_settings()
        delta_max = delta_max or settings.delta_max
        warnings = check_small_cavity_range(config, delta_max, enforce_ground)
        spectrum = small_cavity_spectrum(
            config,
            settings,
            ground_mode,
            delta_max=delta_max,
            enforce_ground=enforce_ground,
            check_range=False,
        )
        delta = config.delta
        k = np.arange(1, config.truncation + 1, dtype=float)
        return cls(
            delta=delta,
            omega_bar=config.omega_bar,
            g=config.g,
            truncation=config.truncation,
            weight0=small_cavity_t00_squared(delta),
            mode_weights=4.0 * delta / (np.pi * k * k),
            frequencies=spectrum.frequencies,
            ground_mode=ground_mode,
            ground_condition_met=not warnings,
            warnings=tuple(warnings),
        )

    @classmethod
    def build(
        cls,
        omega_bar: float,
        g: float,
        delta: float,
        truncation: Optional[int] = None,
        ground_mode: GroundMode = GroundMode.PRINTED,
        enforce_ground: bool = True,
        settings: Optional[Settings] = None,
    ) -> "SmallCavityModel":
        settings = settings or get_settings()
        config = CavityConfig.from_delta(
            omega_bar, g, delta, truncation or settings.small_truncation
        )
        return cls.from_config(config, ground_mode, enforce_ground, settings)

    @property
    def weights(self) -> np.ndarray:
        """Amplitude weights (w0, w0 a_1, ..., w0 a_K) in mode order."""
        return self.weight0 * np.concatenate(([1.0], self.mode_weights))

    @property
    def tail_bound(self) -> float:
        """w0 (4 delta / pi) Sum_{k > K} k^-2."""
        tail = float(polygamma(1, self.truncation + 1))
        return self.weight0 * (4.0 * self.delta / math.pi) * tail


@dataclass(frozen=True)
class MinimumReport:
    t: float
    rho11: float


@dataclass(frozen=True)
class DissipationVerdict:
    label: Dissipation
    basis: VerdictBasis
    evidence: float
    warnings: tuple[str, ...] = ()


def _check_time(t: float) -> None:
    if not t >= 0:
        raise ValidationError(f"time must be >= 0, got {t}", module="small_cavity", t=t)


def _check_xi(xi: float) -> None:
    if not 0 <= xi <= 1:
        raise ValidationError(f"xi must lie in [0, 1], got {xi}", module="small_cavity", xi=xi)


def f00_small(t: float, model: SmallCavityModel) -> SurvivalAmplitude:
    _check_time(t)
    return SurvivalAmplitude(
        t=float(t),
        value=oscillatory_sum(model.weights, model.frequencies, t),
        method=AmplitudeMethod.SMALL_CAVITY,
        leakage_bound=model.tail_bound,
    )


def f00_small_grid(times, model: SmallCavityModel) -> np.ndarray:
    """Vectorised amplitude on a dense grid (blocked matrix products)."""
    return oscillatory_sum_fast(model.weights, model.frequencies, np.asarray(times, dtype=float))


def rho11_small(t: float, model: SmallCavityModel, xi: float) -> float:
    """Excited-state population from the expanded double-sum form."""
    _check_time(t)
    _check_xi(xi)
    delta, g = model.delta, model.g
    k = np.arange(1, model.truncation + 1, dtype=float)
    inverse_sq = 1.0 / (k * k)
    ground = model.frequencies[0]

    single = np.sum(inverse_sq * np.cos((ground - model.frequencies[1:]) * t))
    double = 0.0
    for start in range(0, k.size, _ROW_CHUNK):
        rows = k[start : start + _ROW_CHUNK, None]
        spacing = (g / delta - 2.0 * g / (math.pi * rows * k[None, :])) * (rows - k[None, :])
        weights = inverse_sq[start : start + _ROW_CHUNK, None] * inverse_sq[None, :]
        double += float(np.sum(weights * np.cos(spacing * t)))
    bracket = 1.0 + (8.0 * delta / math.pi) * single + (16.0 * delta**2 / math.pi**2) * double
    return xi * model.weight0**2 * bracket


def rho11_small_grid(times, model: SmallCavityModel, xi: float) -> np.ndarray:
    _check_xi(xi)
    values = f00_small_grid(times, model)
    return xi * (values.real**2 + values.imag**2)


def rho11_lower_bound(delta: float, xi: float) -> float:
    """xi [1 - (8/3) pi delta + (8/9) pi^2 delta^2]."""
    if not delta >= 0:
        raise ValidationError("delta must be >= 0", module="small_cavity", delta=delta)
    _check_xi(xi)
    return xi * (1.0 - (8.0 / 3.0) * math.pi * delta + (8.0 / 9.0) * math.pi**2 * delta**2)


def minimize_rho11(
    model: SmallCavityModel, xi: float, horizon: float, n_points: int = 100_000
) -> MinimumReport:
    """Grid minimum of xi |f00_small|^2 on [0, horizon], refined by bounded Brent search."""
    _check_xi(xi)
    times = np.linspace(0.0, horizon, n_points)
    values = rho11_small_grid(times, model, xi)
    index = int(np.argmin(values))
    best = MinimumReport(t=float(times[index]), rho11=float(values[index]))

    lo = float(times[max(index - 1, 0)])
    hi = float(times[min(index + 1, n_points - 1)])
    if hi > lo:
        result = minimize_scalar(
            lambda t: xi * f00_small(t, model).probability,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-9 * (hi - lo)},
        )
        if result.success and float(result.fun) < best.rho11:
            best = MinimumReport(t=float(result.x), rho11=float(result.fun))
    return best


def continuum_verdict(
    omega_bar: float, g: float, xi: float = 1.0, horizon: Optional[float] = None
) -> DissipationVerdict:
    """Infinite cavity: the excited population decays; evidence is rho11 at the horizon."""
    _check_xi(xi)
    end = horizon or 20.0 / g
    amplitude = f00_continuum(end, omega_bar, g)
    return DissipationVerdict(
        label=Dissipation.DISSIPATIVE,
        basis=VerdictBasis.ASYMPTOTIC,
        evidence=xi * amplitude.probability,
    )


def dissipation_classifier(
    config: CavityConfig,
    xi: float = 1.0,
    continuum: bool = False,
    floor: float = 0.05,
    horizon: Optional[float] = None,
    n_probe: int = 4000,
    delta_max: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> DissipationVerdict:
    """Dissipative or not, with the evidence the decision rests on."""
    settings = settings or get_settings()
    _check_xi(xi)
    if continuum:
        return continuum_verdict(config.omega_bar, config.g, xi, horizon)

    delta = config.delta
    if delta < (delta_max or settings.delta_max):
        bound = rho11_lower_bound(delta, xi)
        if bound > 0:
            warnings = []
            limit = ground_condition(config)
            if not delta < limit:
                warnings.append(
                    f"delta={delta:.6g} does not satisfy delta < 2 g^2/(pi omega_bar^2)={limit:.6g}"
                )
                logger.warning(warnings[-1])
            return DissipationVerdict(
                label=Dissipation.NONDISSIPATIVE,
                basis=VerdictBasis.ANALYTIC,
                evidence=bound,
                warnings=tuple(warnings),
            )

    end = horizon or 1000.0 / config.omega_bar
    spectrum = solve_spectrum(config, settings)
    table = build_couplings(config, spectrum, settings=settings)
    times = np.linspace(0.0, end, n_probe)
    values = oscillatory_sum_fast(table.t0 * table.t0, spectrum.frequencies, times)
    minimum = float(xi * np.min(values.real**2 + values.imag**2))
    label = Dissipation.NONDISSIPATIVE if minimum > floor * xi else Dissipation.DISSIPATIVE
    logger.info("empirical classification at delta=%.6g: min rho11=%.6g", delta, minimum)
    return DissipationVerdict(label=label, basis=VerdictBasis.EMPIRICAL, evidence=minimum)

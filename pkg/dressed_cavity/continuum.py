"""
Infinite-cavity limit of the survival amplitude.

    f00(t) = (4g/pi) Int_0^inf y^2 exp(-i y t) / [(y^2 - omega_bar^2)^2 + 4 g^2 y^2] dy

The real part has closed forms in each kappa regime (kappa^2 = omega_bar^2 - g^2);
the imaginary part G(t) is evaluated by oscillatory quadrature.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from dressed_cavity.errors import ValidationError
from dressed_cavity.evolution import (
    AmplitudeMethod,
    ReducedState,
    SurvivalAmplitude,
    state_from_amplitude,
)
from dressed_cavity.models.schemas import SuperpositionSpec
from dressed_cavity.quadrature import QuadratureReport, check_target, fourier_integral
from dressed_cavity.settings import get_settings

logger = logging.getLogger(__name__)

SERIES_THRESHOLD = 1e-6
G_TARGET_ABS = 1e-8
G_TARGET_REL = 1e-6
_SERIES_MAX_TERMS = 400

# (omega_bar, g) for the three G(t) curves: underdamped, critical, overdamped
FIGURE_G_PARAMETERS = ((1.5, 1.0), (2.0, 2.0), (1.0, 1.2))


class Regime(str, Enum):
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class KappaRegime:
    kappa_sq: float
    regime: Regime

    @property
    def kappa(self) -> float:
        """|kappa|."""
        return math.sqrt(abs(self.kappa_sq))


@dataclass(frozen=True)
class AsymptoticEstimate:
    approximation: AmplitudeMethod
    amplitude: SurvivalAmplitude
    state: ReducedState
    valid: bool
    reasons: tuple[str, ...]


def _check_inputs(t: float, omega_bar: float, g: float) -> None:
    if not (omega_bar > 0 and g > 0):
        raise ValidationError(
            "omega_bar and g must be > 0", module="continuum", omega_bar=omega_bar, g=g
        )
    if not t >= 0:
        raise ValidationError(f"time must be >= 0, got {t}", module="continuum", t=t)


def classify_regime(omega_bar: float, g: float, tol: Optional[float] = None) -> KappaRegime:
    tol = get_settings().critical_tol if tol is None else tol
    kappa_sq = (omega_bar - g) * (omega_bar + g)
    if abs(kappa_sq) <= tol * omega_bar * omega_bar:
        regime = Regime.CRITICAL
    elif kappa_sq > 0:
        regime = Regime.UNDERDAMPED
    else:
        regime = Regime.OVERDAMPED
    return KappaRegime(kappa_sq=kappa_sq, regime=regime)


def _near_critical_series(t: float, kappa_sq: float, g: float) -> float:
    # cos(kt) and sin(kt)/k as power series in z = -kappa^2 t^2, valid for either sign
    z = -kappa_sq * t * t
    even_term = 1.0
    odd_term = t
    even_sum = even_term
    odd_sum = odd_term
    for n in range(1, _SERIES_MAX_TERMS):
        even_term *= z / ((2 * n - 1) * (2 * n))
        odd_term *= z / ((2 * n) * (2 * n + 1))
        even_sum += even_term
        odd_sum += odd_term
        if n >= 2 and abs(even_term) + g * abs(odd_term) <= 1e-17 * (
            abs(even_sum) + g * abs(odd_sum)
        ):
            break
    return math.exp(-g * t) * (even_sum - g * odd_sum)


def f00_real_closed(t: float, omega_bar: float, g: float) -> float:
    """Re f00(t) from the residue closed forms."""
    _check_inputs(t, omega_bar, g)
    kappa_sq = (omega_bar - g) * (omega_bar + g)
    if abs(kappa_sq) < SERIES_THRESHOLD * omega_bar * omega_bar:
        return _near_critical_series(t, kappa_sq, g)
    if kappa_sq > 0:
        kappa = math.sqrt(kappa_sq)
        return math.exp(-g * t) * (math.cos(kappa * t) - (g / kappa) * math.sin(kappa * t))
    kappa = math.sqrt(-kappa_sq)
    # cosh/sinh split into decaying exponentials; kappa < g
    ratio = g / kappa
    return 0.5 * (
        (1.0 + ratio) * math.exp(-(g + kappa) * t) - (ratio - 1.0) * math.exp(-(g - kappa) * t)
    )


def _spectral_density(omega_bar: float, g: float):
    omega_sq = omega_bar * omega_bar
    damping = 4.0 * g * g

    def density(y: float) -> float:
        y_sq = y * y
        detuning = y_sq - omega_sq
        return y_sq / (detuning * detuning + damping * y_sq)

    return density


def _breakpoints(omega_bar: float, g: float) -> tuple[float, ...]:
    return (max(0.0, omega_bar - 3.0 * g), omega_bar, omega_bar + 3.0 * g)


def G_integral(t: float, omega_bar: float, g: float) -> QuadratureReport:
    """G(t) = -(4g/pi) Int_0^inf y^2 sin(y t) / [(y^2 - omega_bar^2)^2 + 4 g^2 y^2] dy."""
    _check_inputs(t, omega_bar, g)
    if t == 0:
        return QuadratureReport(
            value=0.0, abs_error_estimate=0.0, intervals_used=0, accelerated=False
        )
    raw = fourier_integral(_spectral_density(omega_bar, g), t, "sin", _breakpoints(omega_bar, g))
    report = raw.scaled(-4.0 * g / math.pi)
    check_target(report, G_TARGET_ABS, G_TARGET_REL, t=t, omega_bar=omega_bar, g=g)
    return report


def cosine_part_quadrature(t: float, omega_bar: float, g: float) -> QuadratureReport:
    """(4g/pi) Int_0^inf y^2 cos(y t) / [...] dy, computed without the residue forms."""
    _check_inputs(t, omega_bar, g)
    raw = fourier_integral(_spectral_density(omega_bar, g), t, "cos", _breakpoints(omega_bar, g))
    return raw.scaled(4.0 * g / math.pi)


def G_asymptotic(t: float, omega_bar: float, g: float) -> float:
    """8 g / (pi omega_bar^4 t^3), the leading large-t term of G."""
    if not t > 0:
        raise ValidationError("asymptote needs t > 0", module="continuum", t=t)
    return 8.0 * g / (math.pi * omega_bar**4 * t**3)


def f00_continuum_detailed(
    t: float, omega_bar: float, g: float
) -> tuple[SurvivalAmplitude, QuadratureReport]:
    report = G_integral(t, omega_bar, g)
    amplitude = SurvivalAmplitude(
        t=float(t),
        value=complex(f00_real_closed(t, omega_bar, g), report.value),
        method=AmplitudeMethod.CONTINUUM,
        leakage_bound=10.0 * report.abs_error_estimate,
    )
    return amplitude, report


def f00_continuum(t: float, omega_bar: float, g: float) -> SurvivalAmplitude:
    return f00_continuum_detailed(t, omega_bar, g)[0]


def f00_continuum_quadrature(t: float, omega_bar: float, g: float) -> complex:
    """Both parts of f00 by quadrature of the defining integral."""
    real = cosine_part_quadrature(t, omega_bar, g).value
    imag = G_integral(t, omega_bar, g).value
    return complex(real, imag)


def _estimate(
    approximation: AmplitudeMethod,
    t: float,
    value: complex,
    spec: SuperpositionSpec,
    reasons: list[str],
) -> AsymptoticEstimate:
    amplitude = SurvivalAmplitude(t=float(t), value=value, method=approximation)
    if amplitude.probability > 1.0:
        reasons.append("approximate |f00|^2 exceeds 1")
    for reason in reasons:
        logger.debug("%s approximation at t=%.6g: %s", approximation.value, t, reason)
    return AsymptoticEstimate(
        approximation=approximation,
        amplitude=amplitude,
        state=state_from_amplitude(t, value, spec),
        valid=not reasons,
        reasons=tuple(reasons),
    )


def rho_weak_asymptotic(
    t: float, omega_bar: float, g: float, spec: SuperpositionSpec
) -> AsymptoticEstimate:
    """Large-t reduced state for g << omega_bar."""
    _check_inputs(t, omega_bar, g)
    reasons = []
    if g > 0.2 * omega_bar:
        reasons.append(f"g={g:.6g} is not small against omega_bar={omega_bar:.6g}")
    # the dropped exp(-g t) sin(kappa t) part of G only becomes negligible here
    crossover = weak_crossover_time(omega_bar, g)
    if t < crossover:
        reasons.append(f"t={t:.6g} is before the power-law crossover at t={crossover:.6g}")
    if t == 0:
        return _estimate(AmplitudeMethod.WEAK_COUPLING, t, complex(1.0, 0.0), spec, reasons)
    decay = math.exp(-g * t) * (
        math.cos(omega_bar * t) - (g / omega_bar) * math.sin(omega_bar * t)
    )
    value = complex(decay, G_asymptotic(t, omega_bar, g))
    return _estimate(AmplitudeMethod.WEAK_COUPLING, t, value, spec, reasons)


def rho_strong_asymptotic(
    t: float, omega_bar: float, g: float, spec: SuperpositionSpec
) -> AsymptoticEstimate:
    """Large-t reduced state for g >> omega_bar."""
    _check_inputs(t, omega_bar, g)
    reasons = []
    if g < 5.0 * omega_bar:
        reasons.append(f"g={g:.6g} is not large against omega_bar={omega_bar:.6g}")
    crossover = 2.0 * g / omega_bar**2
    if t < 10.0 * crossover:
        reasons.append(f"t={t:.6g} is not large against 2g/omega_bar^2={crossover:.6g}")
    if t == 0:
        return _estimate(AmplitudeMethod.STRONG_COUPLING, t, complex(1.0, 0.0), spec, reasons)
    value = complex(math.exp(-2.0 * g * t), G_asymptotic(t, omega_bar, g))
    return _estimate(AmplitudeMethod.STRONG_COUPLING, t, value, spec, reasons)


def weak_crossover_time(omega_bar: float, g: float) -> float:
    """Time after which 64 g^2/(pi^2 omega_bar^8 t^6) overtakes exp(-2 g t)."""
    _check_inputs(0.0, omega_bar, g)
    log_prefactor = math.log(64.0 * g * g / (math.pi**2 * omega_bar**8))

    def gap(t: float) -> float:
        return -2.0 * g * t - log_prefactor + 6.0 * math.log(t)

    lower = 3.0 / g
    if gap(lower) <= 0:
        return lower
    upper = 2.0 * lower
    while gap(upper) > 0:
        upper *= 2.0
    return float(brentq(gap, lower, upper, xtol=1e-12, rtol=1e-14))


def figure_g_curves(times) -> dict[tuple[float, float], np.ndarray]:
    """G(t) on a grid for each of the three regime examples."""
    return {
        (omega_bar, g): np.array([G_integral(float(t), omega_bar, g).value for t in times])
        for omega_bar, g in FIGURE_G_PARAMETERS
    }

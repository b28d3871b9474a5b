"""
Normal-mode spectrum of the oscillator coupled to the cavity field.

In the dimensionless variable theta = Omega / delta_omega the eigenfrequency
condition reads

    cot(pi theta) = theta / (2 delta) + (1 - a) / (pi theta),
    a = pi omega_bar^2 / (2 g delta_omega).

Writing theta = k + s with s in (0, 1) and multiplying through by
(-1)^k theta sin(pi theta) gives the cleared function

    G_k(s) = (k + s) cos(pi s) - sin(pi s) [(k + s)^2 / (2 delta) + b],  b = (1 - a) / pi,

which is continuous on each pole interval, with G_k(0) = k and G_k(1) = -(k + 1).
The right-hand side minus the cotangent is monotone between poles, so every
interval holds exactly one root.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from dressed_cavity.errors import BracketFailure, DeltaOutOfRange, NonPositiveLowestRoot
from dressed_cavity.models.schemas import CavityConfig
from dressed_cavity.settings import Settings, get_settings

logger = logging.getLogger(__name__)

_CHUNK = 2048
_BRENTQ_MIN_RTOL = 4.0 * np.finfo(float).eps
_S_XTOL = 1e-17
# first bracket point for the lowest interval, where G_0(0) = 0 is spurious
_S_TINY = 2.0**-40


class SpectrumMethod(str, Enum):
    EXACT = "exact"
    SMALL_CAVITY_ASYMPTOTIC = "small_cavity_asymptotic"


class GroundMode(str, Enum):
    """Form of the lowest asymptotic frequency.

    PRINTED is omega_bar (1 - pi delta / 2). SELF_CONSISTENT is
    omega_bar / sqrt(1 + 2 pi delta / 3), the small-theta expansion of the
    eigenfrequency condition, which agrees with the exact root to O(delta^2).
    """

    PRINTED = "printed"
    SELF_CONSISTENT = "self_consistent"


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    offsets: np.ndarray
    residuals: np.ndarray
    method: SpectrumMethod
    delta_omega: float
    delta: float
    truncation: int

    @property
    def size(self) -> int:
        return int(self.frequencies.size)

    @property
    def theta(self) -> np.ndarray:
        return self.frequencies / self.delta_omega

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    def to_rows(self) -> list[tuple[int, float, float]]:
        return [
            (r, float(omega), float(res))
            for r, (omega, res) in enumerate(zip(self.frequencies, self.residuals))
        ]


def derived_params(config: CavityConfig) -> tuple[float, float]:
    """(delta_omega, delta) for a cavity configuration."""
    return config.delta_omega, config.delta


def _b_coefficient(config: CavityConfig) -> float:
    a = math.pi * config.omega_bar**2 / (2.0 * config.g * config.delta_omega)
    return (1.0 - a) / math.pi


def cleared_function(k, s, delta: float, b: float):
    """G_k(s); broadcasts over numpy arrays."""
    theta = k + s
    ps = np.pi * s
    return theta * np.cos(ps) - np.sin(ps) * (theta * theta / (2.0 * delta) + b)


def _cleared_scalar(s: float, k: int, delta: float, b: float) -> float:
    theta = k + s
    ps = math.pi * s
    return theta * math.cos(ps) - math.sin(ps) * (theta * theta / (2.0 * delta) + b)


def scaled_residual(k, s, delta: float, b: float):
    """|G_k(s)| divided by the sum of the magnitudes of its terms."""
    theta = k + s
    ps = np.pi * s
    first = theta * np.cos(ps)
    second = np.sin(ps) * (theta * theta / (2.0 * delta) + b)
    scale = np.abs(first) + np.abs(np.sin(ps)) * (theta * theta / (2.0 * delta) + abs(b))
    return np.abs(first - second) / np.where(scale > 0, scale, 1.0)


def _lowest_interval_start(config: CavityConfig, delta: float, b: float) -> float:
    value = _cleared_scalar(_S_TINY, 0, delta, b)
    if not value > 0:
        raise NonPositiveLowestRoot(
            "no positive bracket for the lowest root in (0, delta_omega)",
            module="spectrum",
            omega_bar=config.omega_bar,
            g=config.g,
            delta=delta,
        )
    return value


def solve_spectrum(
    config: CavityConfig, settings: Optional[Settings] = None, rtol: Optional[float] = None
) -> Spectrum:
    """Exact roots Omega_0 < ... < Omega_K of the eigenfrequency condition."""
    settings = settings or get_settings()
    rtol = max(rtol if rtol is not None else settings.root_rtol, _BRENTQ_MIN_RTOL)
    size = config.truncation + 1
    delta = config.delta
    b = _b_coefficient(config)
    grid = np.arange(settings.scan_points + 1, dtype=float) / settings.scan_points

    offsets = np.empty(size)
    for start in range(0, size, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, size))
        values = cleared_function(ks[:, None].astype(float), grid[None, :], delta, b)
        if start == 0:
            values[0, 0] = _lowest_interval_start(config, delta, b)
        positive = values > 0
        changes = positive[:, :-1] & ~positive[:, 1:]
        for row, k in enumerate(ks):
            hits = np.flatnonzero(changes[row])
            if hits.size == 0:
                raise BracketFailure(
                    "no sign change of the cleared function in pole interval",
                    module="spectrum",
                    interval=int(k),
                    delta=delta,
                    scan_points=settings.scan_points,
                )
            j = int(hits[0])
            lo = _S_TINY if (k == 0 and j == 0) else float(grid[j])
            hi = float(grid[j + 1])
            try:
                offsets[k] = brentq(
                    _cleared_scalar, lo, hi, args=(int(k), delta, b), xtol=_S_XTOL, rtol=rtol
                )
            except (ValueError, RuntimeError) as e:
                raise BracketFailure(
                    f"root refinement failed: {e}",
                    module="spectrum",
                    interval=int(k),
                    bracket=(lo, hi),
                    delta=delta,
                ) from e

    ks = np.arange(size, dtype=float)
    residuals = scaled_residual(ks, offsets, delta, b)
    frequencies = config.delta_omega * (ks + offsets)
    spectrum = Spectrum(
        frequencies=frequencies,
        offsets=offsets,
        residuals=residuals,
        method=SpectrumMethod.EXACT,
        delta_omega=config.delta_omega,
        delta=delta,
        truncation=config.truncation,
    )
    logger.info(
        "solved %d roots (delta=%.6g, max residual %.3e)", size, delta, spectrum.max_residual
    )
    if spectrum.max_residual > settings.residual_tolerance:
        logger.warning(
            "root residual %.3e above tolerance %.1e",
            spectrum.max_residual,
            settings.residual_tolerance,
        )
    return spectrum


def ground_condition(config: CavityConfig) -> float:
    """2 g^2 / (pi omega_bar^2), the upper limit on delta for the small-cavity expansion."""
    return 2.0 * config.g**2 / (math.pi * config.omega_bar**2)


def check_small_cavity_range(
    config: CavityConfig, delta_max: float, enforce_ground: bool = True
) -> list[str]:
    """Raise DeltaOutOfRange outside the expansion's range; return soft warnings."""
    delta = config.delta
    if not delta < delta_max:
        raise DeltaOutOfRange(
            f"delta={delta:.6g} not below delta_max={delta_max:.6g}",
            module="small_cavity",
            delta=delta,
        )
    limit = ground_condition(config)
    if delta < limit:
        return []
    message = f"delta={delta:.6g} violates delta < 2 g^2/(pi omega_bar^2) = {limit:.6g}"
    if enforce_ground:
        raise DeltaOutOfRange(message, module="small_cavity", delta=delta, limit=limit)
    logger.warning(message)
    return [message]


def ground_frequency(omega_bar: float, delta: float, mode: GroundMode) -> float:
    if mode is GroundMode.SELF_CONSISTENT:
        return omega_bar / math.sqrt(1.0 + 2.0 * math.pi * delta / 3.0)
    return omega_bar * (1.0 - math.pi * delta / 2.0)


def small_cavity_spectrum(
    config: CavityConfig,
    settings: Optional[Settings] = None,
    ground_mode: GroundMode = GroundMode.PRINTED,
    delta_max: Optional[float] = None,
    enforce_ground: bool = True,
    check_range: bool = True,
) -> Spectrum:
    """First-order delta expansion of the spectrum.

    Pass check_range=False when the caller has already run check_small_cavity_range.
    """
    settings = settings or get_settings()
    if check_range:
        check_small_cavity_range(config, delta_max or settings.delta_max, enforce_ground)
    delta = config.delta
    size = config.truncation + 1
    ks = np.arange(1, size, dtype=float)

    offsets = np.empty(size)
    offsets[0] = ground_frequency(config.omega_bar, delta, ground_mode) / config.delta_omega
    offsets[1:] = 2.0 * delta / (np.pi * ks)
    frequencies = np.empty(size)
    frequencies[0] = offsets[0] * config.delta_omega
    frequencies[1:] = (config.g / delta) * (ks + offsets[1:])

    b = _b_coefficient(config)
    residuals = scaled_residual(np.arange(size, dtype=float), offsets, delta, b)
    return Spectrum(
        frequencies=frequencies,
        offsets=offsets,
        residuals=residuals,
        method=SpectrumMethod.SMALL_CAVITY_ASYMPTOTIC,
        delta_omega=config.delta_omega,
        delta=delta,
        truncation=config.truncation,
    )


def asymptotic_deviation(
    config: CavityConfig,
    settings: Optional[Settings] = None,
    ground_mode: GroundMode = GroundMode.PRINTED,
) -> float:
    """max_k |Omega_k(exact) - Omega_k(asymptotic)| in units of delta_omega."""
    exact = solve_spectrum(config, settings)
    approx = small_cavity_spectrum(config, settings, ground_mode)
    return float(np.max(np.abs(exact.offsets - approx.offsets)))


def observed_order(deltas, errors) -> float:
    """Least-squares slope of log(error) against log(delta)."""
    slope, _ = np.polyfit(np.log(np.asarray(deltas)), np.log(np.asarray(errors)), 1)
    return float(slope)

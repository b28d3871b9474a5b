"""
Compensated summation for the oscillatory mode sums.

Sums run in ascending mode order through math.fsum, which tracks the exact
partial sum with error-free transformations, so the result does not depend
on cancellation between terms of opposite sign.
"""

import math
from collections.abc import Iterable

import numpy as np


def compensated_sum(values: Iterable[float]) -> float:
    return math.fsum(values)


def oscillatory_sum(weights: np.ndarray, frequencies: np.ndarray, t: float) -> complex:
    """Sum_s w_s exp(-i Omega_s t), real and imaginary parts summed separately."""
    phase = frequencies * t
    real = math.fsum((weights * np.cos(phase)).tolist())
    imag = math.fsum((-weights * np.sin(phase)).tolist())
    return complex(real, imag)


def oscillatory_sum_grid(
    weights: np.ndarray, frequencies: np.ndarray, times: Iterable[float]
) -> np.ndarray:
    """Evaluate oscillatory_sum point by point; each time is independent of the others."""
    return np.array(
        [oscillatory_sum(weights, frequencies, float(t)) for t in times], dtype=complex
    )


_BLOCK_ELEMENTS = 1 << 22


def oscillatory_sum_fast(
    weights: np.ndarray, frequencies: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Blocked matrix-product variant for dense grids where pairwise rounding is acceptable."""
    times = np.asarray(times, dtype=float)
    out = np.empty(times.shape, dtype=complex)
    chunk = max(1, _BLOCK_ELEMENTS // max(frequencies.size, 1))
    for start in range(0, times.size, chunk):
        block = np.outer(times[start : start + chunk], frequencies)
        out[start : start + chunk] = np.cos(block) @ weights - 1j * (np.sin(block) @ weights)
    return out

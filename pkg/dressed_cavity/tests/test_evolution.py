"""
Unit tests for survival amplitudes and reduced states
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dressed_cavity.continuum import f00_continuum
from dressed_cavity.coupling import build_couplings
from dressed_cavity.errors import ContractViolation, UsageError, ValidationError
from dressed_cavity.evolution import (
    AmplitudeMethod,
    SurvivalAmplitude,
    evolve_grid,
    f00_mode_sum,
    f00_mode_sum_grid,
    f_amplitude,
    impurity_identity_check,
    probability_sum,
    reduced_density,
    state_from_amplitude,
    unitarity_defect,
)
from dressed_cavity.models.schemas import CavityConfig, SuperpositionSpec
from dressed_cavity.spectrum import solve_spectrum


def test_f00_at_zero_is_represented_weight(small_table, small_spectrum):
    amplitude = f00_mode_sum(0.0, small_table, small_spectrum)
    assert amplitude.value.real == pytest.approx(1.0 - small_table.row_defect, abs=1e-15)
    assert amplitude.value.imag == 0.0
    assert amplitude.leakage_bound == pytest.approx(abs(small_table.row_defect))
    assert amplitude.method is AmplitudeMethod.MODE_SUM


def test_f_amplitude_particle_entry_matches_f00(small_table, small_spectrum):
    for t in (0.5, 3.0):
        assert f_amplitude(0, 0, t, small_table, small_spectrum) == pytest.approx(
            f00_mode_sum(t, small_table, small_spectrum).value, abs=1e-15
        )


def test_negative_time_rejected(small_table, small_spectrum):
    with pytest.raises(ValidationError):
        f00_mode_sum(-1.0, small_table, small_spectrum)


def test_unitarity_within_truncation_defect(small_table, small_spectrum):
    allowed = 3 * abs(small_table.row_defect)
    for t in (0.0, 1.0, 10.0, 100.0):
        assert unitarity_defect(0, t, small_table, small_spectrum) <= allowed


def test_unitarity_defect_shrinks_with_truncation():
    defects = []
    for truncation in (200, 400):
        config = CavityConfig.from_delta(1.0, 0.5, 0.1, truncation=truncation)
        spectrum = solve_spectrum(config)
        table = build_couplings(config, spectrum)
        defects.append(unitarity_defect(0, 1.0, table, spectrum))
    assert defects[1] < defects[0]


def test_probability_sum_needs_dense_limit(small_table, small_spectrum):
    with pytest.raises(UsageError):
        probability_sum(0, 1.0, small_table, small_spectrum, limit=10)


def test_reduced_density_rejects_amplitude_above_one():
    spec = SuperpositionSpec(xi=0.5)
    amplitude = SurvivalAmplitude(t=1.0, value=complex(1.001, 0), method=AmplitudeMethod.MODE_SUM)
    with pytest.raises(ContractViolation):
        reduced_density(amplitude, spec)


def test_reduced_density_allows_reported_leakage():
    amplitude = SurvivalAmplitude(
        t=1.0, value=complex(1.0005, 0), method=AmplitudeMethod.MODE_SUM, leakage_bound=2e-3
    )
    state = reduced_density(amplitude, SuperpositionSpec(xi=0.5))
    assert state.rho00 + state.rho11 == pytest.approx(1.0)


def test_coherence_carries_phase():
    spec = SuperpositionSpec(xi=0.25, phi=math.pi / 2)
    state = state_from_amplitude(2.0, complex(0.5, 0.0), spec)
    expected = math.sqrt(0.25 * 0.75) * 0.5 * complex(0.0, -1.0)
    assert state.rho10 == pytest.approx(expected)
    assert state.rho01 == pytest.approx(expected.conjugate())
    assert state.rho11 == pytest.approx(0.25 * 0.25)


@given(
    xi=st.floats(min_value=1e-6, max_value=1 - 1e-6),
    phi=st.floats(min_value=-20.0, max_value=20.0),
    radius=st.floats(min_value=0.0, max_value=1.0),
    angle=st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_purity_identity_property(xi, phi, radius, angle):
    spec = SuperpositionSpec(xi=xi, phi=phi)
    value = complex(radius * math.cos(angle), radius * math.sin(angle))
    state = state_from_amplitude(1.0, value, spec)
    population, trace = impurity_identity_check(state, spec)
    assert population <= 1e-12
    assert trace <= 1e-12
    assert abs(state.rho00 + state.rho11 - 1.0) <= 1e-15
    assert state.determinant() >= -1e-15


def test_purity_identity_random_sweep():
    rng = np.random.default_rng(20240611)
    xis = rng.uniform(1e-6, 1 - 1e-6, 10_000)
    phis = rng.uniform(0.0, 2 * math.pi, 10_000)
    radii = np.sqrt(rng.uniform(0.0, 1.0, 10_000))
    angles = rng.uniform(0.0, 2 * math.pi, 10_000)
    worst = 0.0
    for xi, phi, r, a in zip(xis, phis, radii, angles):
        spec = SuperpositionSpec(xi=float(xi), phi=float(phi))
        state = state_from_amplitude(0.0, complex(r * math.cos(a), r * math.sin(a)), spec)
        worst = max(worst, *impurity_identity_check(state, spec))
    assert worst <= 1e-12


def test_evolve_grid_pairs_amplitude_and_state(small_table, small_spectrum):
    spec = SuperpositionSpec(xi=0.6)
    results = evolve_grid([0.0, 1.0, 2.0], small_table, small_spectrum, spec)
    assert [amplitude.t for amplitude, _ in results] == [0.0, 1.0, 2.0]
    for amplitude, state in results:
        assert state.rho11 == pytest.approx(0.6 * amplitude.probability)


@pytest.mark.slow
def test_large_cavity_mode_sum_approaches_continuum():
    """delta = 10 with 1e5 modes tracks the infinite cavity before the first recurrence"""
    config = CavityConfig.from_delta(1.0, 0.5, 10.0, truncation=100_000)
    spectrum = solve_spectrum(config)
    table = build_couplings(config, spectrum)
    for t in np.linspace(0.0, 5.0, 11):
        exact = f00_mode_sum(float(t), table, spectrum).value
        limit = f00_continuum(float(t), 1.0, 0.5).value
        assert abs(exact - limit) <= 1e-3


def _unitarity_allowance(table, mu):
    """|row defect| plus the largest leak through truncated columns."""
    row = table.row(mu)
    row_defect = 1.0 - math.fsum((row * row).tolist())
    leak = math.fsum((np.abs(row) * np.sqrt(np.abs(table.column_defects))).tolist())
    return abs(row_defect) + leak**2 + 1e-9


def test_unitarity_over_random_configurations():
    rng = np.random.default_rng(31)
    truncation = 60
    for _ in range(20):
        omega_bar = float(rng.uniform(0.5, 2.0))
        g = float(rng.uniform(0.05, 2.0))
        delta = float(rng.uniform(0.02, 2.0))
        config = CavityConfig.from_delta(omega_bar, g, delta, truncation=truncation)
        spectrum = solve_spectrum(config)
        table = build_couplings(config, spectrum)
        for mu in (0, 1, truncation // 2):
            allowed = _unitarity_allowance(table, mu)
            for t in (0.0, 1.0 / omega_bar, 10.0 / omega_bar, 100.0 / omega_bar):
                assert unitarity_defect(mu, t, table, spectrum) <= allowed


def test_survival_stays_above_small_cavity_bound(small_table, small_spectrum):
    delta = 0.1
    bound = 1 - (8 / 3) * math.pi * delta + (8 / 9) * math.pi**2 * delta**2
    amplitudes = f00_mode_sum_grid(np.linspace(0.0, 50.0, 2001), small_table, small_spectrum)
    assert min(amplitude.probability for amplitude in amplitudes) > bound

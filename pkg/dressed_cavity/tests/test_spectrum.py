"""
Unit tests for the normal-mode spectrum
"""

import math

import numpy as np
import pytest

from dressed_cavity import spectrum as spectrum_module
from dressed_cavity.errors import BracketFailure, DeltaOutOfRange, ValidationError
from dressed_cavity.models.schemas import FINE_STRUCTURE, CavityConfig
from dressed_cavity.spectrum import (
    GroundMode,
    SpectrumMethod,
    asymptotic_deviation,
    check_small_cavity_range,
    cleared_function,
    derived_params,
    ground_condition,
    ground_frequency,
    observed_order,
    small_cavity_spectrum,
    solve_spectrum,
)


def test_derived_params_for_microwave_cavity():
    """R = 1 cm at omega_bar = 2e11 /s with g = omega_bar/137 gives delta ~ 0.016"""
    omega_bar = 2e11
    config = CavityConfig(
        omega_bar=omega_bar, g=omega_bar * FINE_STRUCTURE, radius=1e-2, wave_speed=3e8
    )
    delta_omega, delta = derived_params(config)
    assert delta_omega == pytest.approx(math.pi * 3e8 / 1e-2)
    assert 0.0150 <= delta <= 0.0160


def test_from_delta_reconstructs_radius():
    config = CavityConfig.from_delta(1.0, 0.5, 0.1)
    assert config.radius == pytest.approx(math.pi * 0.1 / 0.5)
    assert config.delta == pytest.approx(0.1)
    assert config.delta_omega == pytest.approx(5.0)


def test_config_rejects_non_positive_inputs():
    with pytest.raises(ValidationError):
        CavityConfig.from_delta(1.0, 0.5, 0.0)
    with pytest.raises(ValidationError):
        CavityConfig.from_delta(-1.0, 0.5, 0.1)


def test_cleared_function_endpoint_values():
    """G_k(0) = k and G_k(1) = -(k + 1) away from the lowest interval"""
    for k in (1, 2, 10):
        assert cleared_function(k, 0.0, 0.1, 0.3) == pytest.approx(k)
        assert cleared_function(k, 1.0, 0.1, 0.3) == pytest.approx(-(k + 1), rel=1e-9)


def test_one_root_per_pole_interval(small_config, small_spectrum):
    """Offsets lie strictly inside (0, 1) so roots interlace the field frequencies"""
    offsets = small_spectrum.offsets
    assert small_spectrum.size == small_config.truncation + 1
    assert np.all(offsets > 0) and np.all(offsets < 1)
    assert np.all(np.diff(small_spectrum.frequencies) > 0)
    assert small_spectrum.frequencies[0] > 0
    assert small_spectrum.method is SpectrumMethod.EXACT


def test_root_residuals_within_tolerance(small_spectrum):
    assert small_spectrum.max_residual < 1e-8


def test_large_cavity_still_brackets_every_root():
    config = CavityConfig.from_delta(1.0, 0.5, 10.0, truncation=2000)
    spectrum = solve_spectrum(config)
    assert spectrum.max_residual < 1e-8
    assert np.all(np.diff(spectrum.frequencies) > 0)


def test_field_offsets_approach_small_cavity_form():
    config = CavityConfig.from_delta(1.0, 0.5, 0.01, truncation=100)
    spectrum = solve_spectrum(config)
    k = np.arange(1, 101)
    assert spectrum.offsets[1:] == pytest.approx(2 * 0.01 / (np.pi * k), rel=0.05)


def test_ground_frequency_forms():
    assert ground_frequency(1.0, 0.1, GroundMode.PRINTED) == pytest.approx(1 - math.pi * 0.05)
    assert ground_frequency(1.0, 0.1, GroundMode.SELF_CONSISTENT) == pytest.approx(
        1 / math.sqrt(1 + 2 * math.pi * 0.1 / 3)
    )


def test_self_consistent_ground_mode_matches_exact_root():
    config = CavityConfig.from_delta(1.0, 0.5, 0.01, truncation=50)
    exact = solve_spectrum(config).frequencies[0]
    approx = ground_frequency(1.0, 0.01, GroundMode.SELF_CONSISTENT)
    assert abs(exact - approx) < 10 * 0.01**2


def test_small_cavity_range_checks():
    too_big = CavityConfig.from_delta(1.0, 0.5, 0.25)
    with pytest.raises(DeltaOutOfRange):
        check_small_cavity_range(too_big, delta_max=0.2)

    microwave = CavityConfig.from_delta(1.0, FINE_STRUCTURE, 0.0155)
    assert not 0.0155 < ground_condition(microwave)
    with pytest.raises(DeltaOutOfRange):
        check_small_cavity_range(microwave, delta_max=0.2)
    warnings = check_small_cavity_range(microwave, delta_max=0.2, enforce_ground=False)
    assert len(warnings) == 1


def test_small_cavity_spectrum_layout():
    config = CavityConfig.from_delta(1.0, 0.5, 0.05, truncation=20)
    spectrum = small_cavity_spectrum(config, ground_mode=GroundMode.SELF_CONSISTENT)
    assert spectrum.method is SpectrumMethod.SMALL_CAVITY_ASYMPTOTIC
    assert spectrum.frequencies[3] == pytest.approx(10.0 * (3 + 2 * 0.05 / (3 * np.pi)))


def test_asymptotic_spectrum_converges_at_second_order():
    deltas = [0.04, 0.02, 0.01]
    errors = [
        asymptotic_deviation(
            CavityConfig.from_delta(1.0, 0.5, d, truncation=200),
            ground_mode=GroundMode.SELF_CONSISTENT,
        )
        for d in deltas
    ]
    assert errors[0] > errors[1] > errors[2]
    assert observed_order(deltas, errors) >= 1.7


def test_spectrum_rows():
    config = CavityConfig.from_delta(1.0, 0.5, 0.1, truncation=3)
    rows = solve_spectrum(config).to_rows()
    assert [r for r, _, _ in rows] == [0, 1, 2, 3]


def test_solver_lands_on_zeros_of_cleared_function():
    config = CavityConfig.from_delta(1.0, 0.5, 0.1, truncation=3)
    spectrum = solve_spectrum(config)
    a = math.pi / (2 * 0.5 * config.delta_omega)
    b = (1 - a) / math.pi
    for k, s in enumerate(spectrum.offsets):
        assert 0 < s < 1
        scale = (k + s) + (k + s) ** 2 / (2 * 0.1) + abs(b)
        assert abs(cleared_function(k, s, 0.1, b)) <= 1e-10 * scale
    expected = config.delta_omega * (np.arange(4) + spectrum.offsets)
    assert spectrum.frequencies == pytest.approx(expected)


def test_refinement_errors_become_bracket_failures(monkeypatch):
    def refuse(*args, **kwargs):
        raise ValueError("f(a) and f(b) must have different signs")

    monkeypatch.setattr(spectrum_module, "brentq", refuse)
    with pytest.raises(BracketFailure) as excinfo:
        solve_spectrum(CavityConfig.from_delta(1.0, 0.5, 0.1, truncation=3))
    assert excinfo.value.context["interval"] == 0
    assert excinfo.value.context["module"] == "spectrum"


def _fixed_cavity(g, truncation=40):
    """Delta omega = 5 for every g (R = pi / 5, c = 1)."""
    return CavityConfig(
        omega_bar=1.0, g=g, radius=math.pi / 5, wave_speed=1.0, truncation=truncation
    )


def test_decoupling_limit():
    spectrum = solve_spectrum(_fixed_cavity(1e-4))
    assert spectrum.frequencies[0] == pytest.approx(1.0, abs=1e-3)
    assert spectrum.frequencies[1:] == pytest.approx(5.0 * np.arange(1, 41), abs=1e-3)


def test_ground_frequency_decreases_with_coupling():
    couplings = np.linspace(0.05, 2.0, 40)
    grounds = [
        solve_spectrum(_fixed_cavity(float(g), truncation=5)).frequencies[0] for g in couplings
    ]
    assert np.all(np.diff(grounds) < 0)

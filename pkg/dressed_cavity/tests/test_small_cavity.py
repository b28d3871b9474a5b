"""
Unit tests for the small-cavity expansion and dissipation verdicts
"""

import numpy as np
import pytest

from dressed_cavity import small_cavity as small_cavity_module
from dressed_cavity import spectrum as spectrum_module
from dressed_cavity.coupling import build_couplings
from dressed_cavity.errors import DeltaOutOfRange, ValidationError
from dressed_cavity.evolution import f00_mode_sum
from dressed_cavity.models.schemas import FINE_STRUCTURE, CavityConfig
from dressed_cavity.small_cavity import (
    Dissipation,
    SmallCavityModel,
    VerdictBasis,
    continuum_verdict,
    dissipation_classifier,
    f00_small,
    f00_small_grid,
    minimize_rho11,
    rho11_lower_bound,
    rho11_small,
    rho11_small_grid,
)
from dressed_cavity.spectrum import GroundMode, observed_order, solve_spectrum


@pytest.fixture
def model():
    return SmallCavityModel.build(1.0, 0.5, 0.05, truncation=300)


def test_double_sum_matches_squared_amplitude(model):
    for t in (0.0, 0.37, 4.0, 55.5):
        expected = 0.7 * f00_small(t, model).probability
        assert rho11_small(t, model, 0.7) == pytest.approx(expected, abs=1e-12)


def test_amplitude_at_zero_misses_only_the_tail(model):
    start = f00_small(0.0, model)
    assert 1.0 - start.value.real == pytest.approx(model.tail_bound, rel=1e-8)
    assert start.leakage_bound == model.tail_bound


def test_grid_and_pointwise_paths_agree(model):
    times = np.linspace(0.0, 30.0, 17)
    grid = f00_small_grid(times, model)
    pointwise = np.array([f00_small(float(t), model).value for t in times])
    assert grid == pytest.approx(pointwise, abs=1e-12)
    assert rho11_small_grid(times, model, 0.4) == pytest.approx(
        0.4 * np.abs(pointwise) ** 2, abs=1e-12
    )


def test_lower_bound_reproduces_microwave_value():
    assert 0.865 <= rho11_lower_bound(0.016, 0.8) / 0.8 <= 0.872


def test_population_stays_above_lower_bound():
    microwave = SmallCavityModel.build(
        1.0, FINE_STRUCTURE, 0.016, truncation=1000, enforce_ground=False
    )
    assert not microwave.ground_condition_met
    minimum = minimize_rho11(microwave, 1.0, horizon=1000.0, n_points=20_000)
    assert minimum.rho11 >= rho11_lower_bound(0.016, 1.0) - 1e-3
    assert 0.0 <= minimum.t <= 1000.0


def test_ground_condition_enforced_by_default():
    with pytest.raises(DeltaOutOfRange):
        SmallCavityModel.build(1.0, FINE_STRUCTURE, 0.016)


def test_delta_above_range_rejected():
    with pytest.raises(DeltaOutOfRange):
        SmallCavityModel.build(1.0, 0.5, 0.3)


def test_xi_and_time_validated(model):
    with pytest.raises(ValidationError):
        rho11_small(1.0, model, 1.5)
    with pytest.raises(ValidationError):
        f00_small(-0.1, model)


def test_no_decay_in_small_cavity():
    model = SmallCavityModel.build(1.0, 0.5, 0.1, truncation=1000)
    times = np.linspace(1.0, 200.0, 4000)
    values = np.abs(f00_small_grid(times, model))
    assert values.max() < 1 - 1e-3
    assert values.min() > 0.5


@pytest.mark.slow
def test_expansion_error_is_second_order():
    deltas = [0.04, 0.02, 0.01]
    times = np.linspace(0.0, 20.0, 201)
    errors = []
    for delta in deltas:
        config = CavityConfig.from_delta(1.0, 0.5, delta, truncation=2000)
        spectrum = solve_spectrum(config)
        table = build_couplings(config, spectrum)
        model = SmallCavityModel.from_config(config, GroundMode.SELF_CONSISTENT)
        gaps = [
            abs(f00_small(float(t), model).value - f00_mode_sum(float(t), table, spectrum).value)
            for t in times
        ]
        errors.append(max(gaps))
    assert observed_order(deltas, errors) >= 1.7


def test_continuum_is_dissipative():
    verdict = continuum_verdict(1.0, 0.5)
    assert verdict.label is Dissipation.DISSIPATIVE
    assert verdict.basis is VerdictBasis.ASYMPTOTIC
    assert verdict.evidence < 1e-3


def test_small_cavity_verdict_is_analytic():
    config = CavityConfig.from_delta(1.0, FINE_STRUCTURE, 0.016)
    verdict = dissipation_classifier(config, xi=0.5)
    assert verdict.label is Dissipation.NONDISSIPATIVE
    assert verdict.basis is VerdictBasis.ANALYTIC
    assert verdict.evidence == pytest.approx(rho11_lower_bound(0.016, 0.5))
    assert verdict.warnings


def test_large_cavity_verdict_is_empirical():
    config = CavityConfig.from_delta(1.0, 0.5, 2.0, truncation=2000)
    verdict = dissipation_classifier(config, xi=1.0, horizon=200.0, n_probe=2000)
    assert verdict.label is Dissipation.DISSIPATIVE
    assert verdict.basis is VerdictBasis.EMPIRICAL


def test_delta_at_range_limit_is_not_analytic():
    config = CavityConfig.from_delta(1.0, 0.5, 0.2, truncation=200)
    limit = config.delta
    with pytest.raises(DeltaOutOfRange):
        SmallCavityModel.from_config(config, delta_max=limit)
    verdict = dissipation_classifier(config, xi=1.0, delta_max=limit, horizon=50.0, n_probe=500)
    assert verdict.basis is VerdictBasis.EMPIRICAL


def test_range_checked_once_per_model(monkeypatch):
    calls = []
    original = spectrum_module.check_small_cavity_range

    def counting(*args, **kwargs):
        calls.append(args)
        return original(*args, **kwargs)

    monkeypatch.setattr(spectrum_module, "check_small_cavity_range", counting)
    monkeypatch.setattr(small_cavity_module, "check_small_cavity_range", counting)
    model = SmallCavityModel.build(1.0, FINE_STRUCTURE, 0.016, truncation=50, enforce_ground=False)
    assert len(calls) == 1
    assert len(model.warnings) == 1

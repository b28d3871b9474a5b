import math

from dressed_cavity.commands.context import EVOLUTION_HEADER, OutputTable, RunContext, state_row
from dressed_cavity.continuum import (
    classify_regime,
    f00_continuum_detailed,
    rho_strong_asymptotic,
    rho_weak_asymptotic,
)
from dressed_cavity.evolution import reduced_density

APPROXIMATIONS = {"weak": rho_weak_asymptotic, "strong": rho_strong_asymptotic}


def compute(context: RunContext) -> None:
    """Infinite-cavity evolution, exact or through a large-t approximation."""
    spec = context.spec
    omega_bar, g = spec.omega_bar, spec.g
    superposition = spec.superposition
    regime = classify_regime(omega_bar, g, spec.tolerances.critical).regime
    approximate = APPROXIMATIONS.get(spec.approximation)

    rows = []
    for t in spec.time_grid.points():
        t = float(t)
        if approximate is None:
            amplitude, report = f00_continuum_detailed(t, omega_bar, g)
            state = reduced_density(amplitude, superposition)
            error, valid = report.abs_error_estimate, True
        else:
            estimate = approximate(t, omega_bar, g, superposition)
            amplitude, state = estimate.amplitude, estimate.state
            error, valid = math.nan, estimate.valid
            for reason in estimate.reasons:
                if not reason.startswith("t="):
                    context.warn(f"{spec.approximation} approximation: {reason}")
            if not estimate.valid:
                context.warn(
                    f"{spec.approximation} approximation outside its validity range at some times"
                )
        context.checked_states.append((state, superposition))
        rows.append([*state_row(state, amplitude), regime, error, valid])

    header = [*EVOLUTION_HEADER, "regime", "g_error_estimate", "validity_flag"]
    context.table = OutputTable(header, rows)

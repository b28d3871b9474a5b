from dressed_cavity.commands.context import OutputTable, RunContext
from dressed_cavity.coupling import build_couplings
from dressed_cavity.evolution import f00_mode_sum
from dressed_cavity.small_cavity import (
    SmallCavityModel,
    f00_small,
    rho11_lower_bound,
    rho11_small,
)
from dressed_cavity.spectrum import GroundMode, solve_spectrum

HEADER = ["t", "rho11_small", "rho11_exact", "lower_bound", "defect"]


def compute(context: RunContext) -> None:
    """Expanded population against the exact mode sum and the analytic bound.

    The defect column is the gap between the double-sum population and
    xi |f00_small|^2, two forms of the same expansion.
    """
    spec = context.spec
    config = context.require_config()
    xi = spec.superposition.xi
    model = SmallCavityModel.from_config(
        config.with_truncation(spec.small_truncation),
        GroundMode(spec.ground_mode),
        enforce_ground=spec.enforce_ground,
        settings=context.settings,
        delta_max=spec.tolerances.delta_max,
    )
    for message in model.warnings:
        context.warn(message)

    spectrum = solve_spectrum(config, context.settings, rtol=spec.tolerances.root_rtol)
    table = build_couplings(config, spectrum, spec.keep_eta_term, context.settings)
    bound = rho11_lower_bound(model.delta, xi)

    rows = []
    for t in spec.time_grid.points():
        t = float(t)
        expanded = rho11_small(t, model, xi)
        defect = abs(expanded - xi * f00_small(t, model).probability)
        exact = xi * f00_mode_sum(t, table, spectrum).probability
        context.observe_defect(defect)
        if expanded < bound:
            context.warn(f"expanded rho11 fell below the lower bound at t={t:.6g}")
        rows.append([t, expanded, exact, bound, defect])
    context.table = OutputTable(HEADER, rows)

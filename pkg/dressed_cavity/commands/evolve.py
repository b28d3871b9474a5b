from dressed_cavity.commands.context import (
    EVOLUTION_HEADER,
    OutputTable,
    RunContext,
    evolution_rows,
)
from dressed_cavity.continuum import f00_continuum
from dressed_cavity.coupling import build_couplings
from dressed_cavity.evolution import f00_mode_sum_grid
from dressed_cavity.small_cavity import SmallCavityModel, f00_small
from dressed_cavity.spectrum import GroundMode, solve_spectrum


def compute(context: RunContext) -> None:
    """Survival amplitude and reduced density matrix on the time grid."""
    spec = context.spec
    times = spec.time_grid.points()

    if spec.method == "continuum":
        amplitudes = [f00_continuum(float(t), spec.omega_bar, spec.g) for t in times]
    elif spec.method == "small-cavity":
        config = context.require_config().with_truncation(spec.small_truncation)
        model = SmallCavityModel.from_config(
            config,
            GroundMode(spec.ground_mode),
            enforce_ground=spec.enforce_ground,
            settings=context.settings,
            delta_max=spec.tolerances.delta_max,
        )
        for message in model.warnings:
            context.warn(message)
        amplitudes = [f00_small(float(t), model) for t in times]
    else:
        config = context.require_config()
        spectrum = solve_spectrum(config, context.settings, rtol=spec.tolerances.root_rtol)
        table = build_couplings(config, spectrum, spec.keep_eta_term, context.settings)
        context.observe_defect(spectrum.max_residual)
        amplitudes = f00_mode_sum_grid(times, table, spectrum)

    context.table = OutputTable(
        EVOLUTION_HEADER, evolution_rows(context, amplitudes, spec.superposition)
    )

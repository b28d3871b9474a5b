from dressed_cavity.commands.context import OutputTable, RunContext
from dressed_cavity.continuum import FIGURE_G_PARAMETERS, f00_continuum, figure_g_curves
from dressed_cavity.evolution import reduced_density
from dressed_cavity.models.schemas import SuperpositionSpec
from dressed_cavity.small_cavity import SmallCavityModel, f00_small
from dressed_cavity.spectrum import GroundMode

FIGURE_XI = (0.3, 0.6, 0.9)
G_COLUMNS = ("G_underdamped", "G_critical", "G_overdamped")


def _impurity_table(context: RunContext, amplitudes) -> OutputTable:
    phi = context.spec.superposition.phi
    superpositions = [SuperpositionSpec(xi=xi, phi=phi) for xi in FIGURE_XI]
    rows = []
    for amplitude in amplitudes:
        context.check_leakage(amplitude)
        row = [amplitude.t]
        for superposition in superpositions:
            state = reduced_density(amplitude, superposition)
            context.checked_states.append((state, superposition))
            row.append(state.impurity)
        rows.append(row)
    return OutputTable(["t", *(f"D_xi_{xi}" for xi in FIGURE_XI)], rows)


def compute(context: RunContext) -> None:
    spec = context.spec
    times = spec.time_grid.points()

    if spec.which == 1:
        curves = figure_g_curves(times)
        columns = [curves[parameters] for parameters in FIGURE_G_PARAMETERS]
        rows = [[float(t), *(float(column[i]) for column in columns)] for i, t in enumerate(times)]
        context.table = OutputTable(["t", *G_COLUMNS], rows)
    elif spec.which == 2:
        amplitudes = [f00_continuum(float(t), spec.omega_bar, spec.g) for t in times]
        context.table = _impurity_table(context, amplitudes)
    else:
        config = context.require_config().with_truncation(spec.small_truncation)
        model = SmallCavityModel.from_config(
            config,
            GroundMode(spec.ground_mode),
            enforce_ground=spec.enforce_ground,
            settings=context.settings,
            delta_max=spec.tolerances.delta_max,
        )
        amplitudes = [f00_small(float(t), model) for t in times]
        context.table = _impurity_table(context, amplitudes)

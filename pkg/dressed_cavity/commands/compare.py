import math

from dressed_cavity.commands.context import OutputTable, RunContext
from dressed_cavity.continuum import f00_continuum
from dressed_cavity.coupling import build_couplings
from dressed_cavity.errors import DeltaOutOfRange
from dressed_cavity.evolution import f00_mode_sum
from dressed_cavity.small_cavity import SmallCavityModel, f00_small
from dressed_cavity.spectrum import GroundMode, solve_spectrum

HEADER = [
    "t",
    "re_mode_sum",
    "im_mode_sum",
    "re_continuum",
    "im_continuum",
    "re_small",
    "im_small",
    "diff_continuum",
    "diff_small",
    "in_recurrence_window",
]


def compute(context: RunContext) -> None:
    """Exact mode sum against the continuum limit and the small-cavity expansion.

    The continuum comparison only holds before the first field recurrence at
    2 pi / delta_omega; rows after it are flagged.
    """
    spec = context.spec
    config = context.require_config()
    spectrum = solve_spectrum(config, context.settings, rtol=spec.tolerances.root_rtol)
    table = build_couplings(config, spectrum, spec.keep_eta_term, context.settings)
    recurrence = 2.0 * math.pi / config.delta_omega

    model = None
    try:
        model = SmallCavityModel.from_config(
            config.with_truncation(min(spec.small_truncation, config.truncation)),
            GroundMode(spec.ground_mode),
            enforce_ground=spec.enforce_ground,
            settings=context.settings,
            delta_max=spec.tolerances.delta_max,
        )
    except DeltaOutOfRange as e:
        context.warn(f"small-cavity comparison skipped: {e.message}")

    rows = []
    for t in spec.time_grid.points():
        t = float(t)
        exact = f00_mode_sum(t, table, spectrum)
        continuum = f00_continuum(t, config.omega_bar, config.g).value
        small = f00_small(t, model).value if model is not None else complex(math.nan, math.nan)
        rows.append(
            [
                t,
                exact.value.real,
                exact.value.imag,
                continuum.real,
                continuum.imag,
                small.real,
                small.imag,
                abs(exact.value - continuum),
                abs(exact.value - small),
                t < recurrence,
            ]
        )
        context.observe_defect(exact.leakage_bound)
    if any(not row[-1] for row in rows):
        context.warn(f"times beyond the recurrence time {recurrence:.6g} are not comparable")
    context.table = OutputTable(HEADER, rows)

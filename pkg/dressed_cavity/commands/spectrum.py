from dressed_cavity.commands.context import OutputTable, RunContext
from dressed_cavity.coupling import build_couplings
from dressed_cavity.errors import UsageError
from dressed_cavity.spectrum import GroundMode, small_cavity_spectrum, solve_spectrum


def compute(context: RunContext) -> None:
    """Normal-mode frequencies, optionally with the particle row of the transformation."""
    spec = context.spec
    config = context.require_config()

    if spec.method == "continuum":
        raise UsageError("the continuum limit has no discrete spectrum", flag="--method")
    if spec.method == "small-cavity":
        spectrum = small_cavity_spectrum(
            config,
            context.settings,
            GroundMode(spec.ground_mode),
            delta_max=spec.tolerances.delta_max,
            enforce_ground=spec.enforce_ground,
        )
    else:
        spectrum = solve_spectrum(config, context.settings, rtol=spec.tolerances.root_rtol)
        context.observe_defect(spectrum.max_residual)
        if spectrum.max_residual > spec.tolerances.residual:
            context.warn(f"max root residual {spectrum.max_residual:.3e} above tolerance")

    header = ["r", "omega_r", "residual"]
    rows = spectrum.to_rows()

    if spec.couplings or spec.tk_matrix_path:
        table = build_couplings(config, spectrum, spec.keep_eta_term, context.settings)
        context.observe_defect(abs(table.row_defect))
        if abs(table.row_defect) > 1e-4:
            context.warn(f"particle row truncation defect {table.row_defect:.3e}")
        if spec.couplings:
            header += ["t0r", "defect_r"]
            rows = [
                (r, omega, residual, t0r, defect)
                for (r, omega, residual), (_, t0r, defect) in zip(rows, table.to_rows())
            ]
        if spec.tk_matrix_path:
            context.extra_outputs.append(
                OutputTable(["k", "r", "tkr"], table.iter_tk_entries(), spec.tk_matrix_path)
            )

    context.table = OutputTable(header, rows)

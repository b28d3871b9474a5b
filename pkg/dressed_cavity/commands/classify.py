from dressed_cavity.commands.context import OutputTable, RunContext
from dressed_cavity.small_cavity import continuum_verdict, dissipation_classifier

HEADER = ["label", "basis", "evidence", "xi", "delta"]


def compute(context: RunContext) -> None:
    spec = context.spec
    xi = spec.superposition.xi
    if spec.continuum:
        verdict = continuum_verdict(spec.omega_bar, spec.g, xi)
        delta = float("inf")
    else:
        config = context.require_config()
        verdict = dissipation_classifier(
            config,
            xi,
            floor=spec.tolerances.dissipation_floor,
            delta_max=spec.tolerances.delta_max,
            settings=context.settings,
        )
        delta = config.delta
    for message in verdict.warnings:
        context.warn(message)
    context.table = OutputTable(
        HEADER, [[verdict.label, verdict.basis, verdict.evidence, xi, delta]]
    )

from dressed_cavity.commands import (
    classify,
    compare,
    continuum,
    evolve,
    figures,
    small_cavity,
    spectrum,
)

COMMANDS = {
    "spectrum": spectrum.compute,
    "evolve": evolve.compute,
    "continuum": continuum.compute,
    "small-cavity": small_cavity.compute,
    "compare": compare.compute,
    "figures": figures.compute,
    "classify": classify.compute,
}

__all__ = [
    "COMMANDS",
    "classify",
    "compare",
    "continuum",
    "evolve",
    "figures",
    "small_cavity",
    "spectrum",
]

from dressed_cavity.models.schemas import (
    CavityConfig,
    RunSpec,
    SuperpositionSpec,
    TimeGrid,
    Tolerances,
    validated,
)

__all__ = [
    "CavityConfig",
    "RunSpec",
    "SuperpositionSpec",
    "TimeGrid",
    "Tolerances",
    "validated",
]

import math
from typing import Any, Literal, Optional, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from dressed_cavity.errors import ValidationError
from dressed_cavity.settings import get_settings

ModelT = TypeVar("ModelT", bound=BaseModel)

FINE_STRUCTURE = 1.0 / 137.0


class CavityConfig(BaseModel):
    """Physical inputs: renormalised frequency, coupling, radius, wave speed, truncation."""

    model_config = ConfigDict(frozen=True)

    omega_bar: float = Field(gt=0, allow_inf_nan=False)
    g: float = Field(gt=0, allow_inf_nan=False)
    radius: float = Field(gt=0, allow_inf_nan=False)
    wave_speed: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    truncation: int = Field(default_factory=lambda: get_settings().truncation, ge=1)

    @classmethod
    def from_delta(
        cls, omega_bar: float, g: float, delta: float, truncation: Optional[int] = None
    ) -> "CavityConfig":
        """Rebuild the radius from delta = gR/(pi c) with c = 1."""
        if not delta > 0:
            raise ValidationError("delta must be > 0", field="delta", value=delta)
        fields: dict[str, Any] = dict(
            omega_bar=omega_bar, g=g, radius=math.pi * delta / g, wave_speed=1.0
        )
        if truncation is not None:
            fields["truncation"] = truncation
        return validated(cls, **fields)

    @property
    def delta_omega(self) -> float:
        return math.pi * self.wave_speed / self.radius

    @property
    def delta(self) -> float:
        return self.g / self.delta_omega

    @property
    def eta(self) -> float:
        return math.sqrt(4.0 * self.g * self.delta_omega / math.pi)

    def field_frequency(self, k: int) -> float:
        return k * self.delta_omega

    def with_truncation(self, truncation: int) -> "CavityConfig":
        return validated(CavityConfig, **{**self.model_dump(), "truncation": truncation})


class SuperpositionSpec(BaseModel):
    """Initial state sqrt(xi)|excited> + sqrt(1-xi) e^{i phi}|ground>."""

    model_config = ConfigDict(frozen=True)

    xi: float = Field(gt=0, lt=1)
    phi: float = Field(default=0.0, allow_inf_nan=False)

    @field_validator("phi")
    @classmethod
    def normalise_phase(cls, value: float) -> float:
        wrapped = math.fmod(value, 2.0 * math.pi)
        if wrapped < 0:
            wrapped += 2.0 * math.pi
        if wrapped >= 2.0 * math.pi:
            wrapped = 0.0
        return wrapped


class TimeGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_start: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    t_end: float = Field(default=50.0, allow_inf_nan=False)
    n_points: int = Field(default=501, ge=2)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def check_bounds(self) -> "TimeGrid":
        if not self.t_end > self.t_start:
            raise ValueError("t_end must be greater than t_start")
        if self.spacing == "log" and self.t_start <= 0:
            raise ValueError("log spacing requires t_start > 0")
        return self

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_start, self.t_end, self.n_points)
        return np.linspace(self.t_start, self.t_end, self.n_points)


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True)

    root_rtol: float = Field(default_factory=lambda: get_settings().root_rtol, gt=0)
    residual: float = Field(default_factory=lambda: get_settings().residual_tolerance, gt=0)
    identity: float = Field(default=1e-12, gt=0)
    delta_max: float = Field(default_factory=lambda: get_settings().delta_max, gt=0)
    critical: float = Field(default_factory=lambda: get_settings().critical_tol, gt=0)
    dissipation_floor: float = Field(default=0.05, gt=0, lt=1)


class RunSpec(BaseModel):
    """Fully resolved CLI request."""

    model_config = ConfigDict(frozen=True)

    command: Literal[
        "spectrum", "evolve", "continuum", "small-cavity", "compare", "figures", "classify"
    ]
    omega_bar: float = Field(gt=0)
    g: float = Field(gt=0)
    config: Optional[CavityConfig] = None
    superposition: SuperpositionSpec = SuperpositionSpec(xi=0.5)
    time_grid: TimeGrid = TimeGrid()
    output_path: Optional[str] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    which: Optional[Literal[1, 2, 3]] = None
    method: Literal["mode-sum", "small-cavity", "continuum"] = "mode-sum"
    ground_mode: Literal["printed", "self_consistent"] = "printed"
    approximation: Literal["exact", "weak", "strong"] = "exact"
    keep_eta_term: bool = True
    enforce_ground: bool = True
    couplings: bool = False
    tk_matrix_path: Optional[str] = None
    continuum: bool = False
    small_truncation: int = Field(default_factory=lambda: get_settings().small_truncation, ge=1)
    metrics_file: Optional[str] = None

    def meta(self) -> dict[str, Any]:
        """Flat key/value view used for CSV metadata headers."""
        flat: dict[str, Any] = {}
        for key, value in self.model_dump(mode="json").items():
            if isinstance(value, dict):
                for sub_key, sub_value in value.items():
                    flat[f"{key}.{sub_key}"] = sub_value
            else:
                flat[key] = value
        return flat


def validated(model_cls: type[ModelT], **fields: Any) -> ModelT:
    """Build a model, translating pydantic failures into ValidationError."""
    try:
        return model_cls(**fields)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or model_cls.__name__
        raise ValidationError(
            f"{model_cls.__name__}.{location}: {first['msg']}",
            field=location,
            value=first.get("input"),
        ) from exc

"""Declarative algorithm and run configuration.

Every model rejects unknown keys and is immutable, so a config is a value
that can be hashed, logged and written back out as a run manifest.
"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from degrade.model import DEFAULT_EPS
from errors import ImageIOError, InvalidArgumentError
from priors.profiles import PriorTable
from utils import config_hash


class ScheduleMode(str, Enum):
    PARALLEL = "parallel"
    SERIAL = "serial"


class ModelingForm(str, Enum):
    TBD = "tbd"
    HB = "hb"


class InitImage(str, Enum):
    DEGRADED = "degraded"
    CURSORY = "cursory"


class PqUpdate(str, Enum):
    GAUSS_SEIDEL = "gauss_seidel"
    JACOBI = "jacobi"


class DptMode(str, Enum):
    ATTENTION = "attention"
    DIRECT = "direct"


class WeightSchedule(str, Enum):
    LOG = "log"
    LINEAR = "linear"
    EXP = "exp"


class _Settings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PenaltySchedule(_Settings):
    """α, β, γ start at their base values and grow by ``increment`` every step."""

    alpha0: float = Field(0.5, gt=0.0)
    beta0: float = Field(0.5, gt=0.0)
    gamma0: float = Field(0.5, gt=0.0)
    increment: float = Field(0.05, ge=0.0)

    def value_at(self, base: float, k: int) -> float:
        if k < 1:
            raise InvalidArgumentError(f"penalty step index starts at 1, got {k}")
        return base + self.increment * (k - 1)

    def values(self, k: int):
        """(α_k, β_k, γ_k) for 1-based step k."""
        return (
            self.value_at(self.alpha0, k),
            self.value_at(self.beta0, k),
            self.value_at(self.gamma0, k),
        )


class DptConfig(_Settings):
    patch: int = Field(16, ge=1)
    tau: float = Field(0.1, gt=0.0)
    rho: float = Field(0.5, ge=0.0, le=1.0)
    mode: DptMode = DptMode.ATTENTION


class EstimateConfig(_Settings):
    lowlight_luminance: float = Field(0.18, gt=0.0, lt=1.0)
    rain_energy_ratio: float = Field(1.5, ge=1.0)
    haze_dark_channel: float = Field(0.4, ge=0.0, le=1.0)
    dark_channel_patch: int = Field(15, ge=1)
    omega: float = Field(0.95, gt=0.0, le=1.0)
    median_size: int = Field(5, ge=3)
    brightest_fraction: float = Field(0.001, gt=0.0, le=1.0)
    illumination_sigma_divisor: float = Field(16.0, gt=0.0)
    # typical max-channel reflectance of a well-exposed scene
    lowlight_reflectance: float = Field(0.75, gt=0.0, le=1.0)


class SolverConfig(_Settings):
    steps: int = Field(6, ge=1)
    schedule: PenaltySchedule = PenaltySchedule()
    mode: ScheduleMode = ScheduleMode.PARALLEL
    modeling_form: ModelingForm = ModelingForm.TBD
    priors: PriorTable = PriorTable()
    dpt: DptConfig = DptConfig()
    eps: float = Field(DEFAULT_EPS, gt=0.0)
    reference_modeling: bool = True
    init_image: InitImage = InitImage.DEGRADED
    pq_update: PqUpdate = PqUpdate.GAUSS_SEIDEL
    record_energy: bool = True

    def payload(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)

    def digest(self) -> str:
        return config_hash(self.payload())


class LossConfig(_Settings):
    xi: float = Field(1e-3, gt=0.0)
    schedule: WeightSchedule = WeightSchedule.EXP


KIND_CHOICES = ("auto", "rain", "haze", "lowlight")


class RunConfig(_Settings):
    """Everything one ``restore`` invocation depends on."""

    solver: SolverConfig = SolverConfig()
    estimate: EstimateConfig = EstimateConfig()
    loss: LossConfig = LossConfig()
    input: Optional[str] = None
    ref_degraded: Optional[str] = None
    ref_clean: Optional[str] = None
    ref_pool: Optional[str] = None
    ref_seed: int = Field(0, ge=0)
    ref_trials: int = Field(1, ge=1)
    gt: Optional[str] = None
    output: Optional[str] = None
    kind: str = "auto"
    seed: int = Field(0, ge=0)
    dump_intermediate: Optional[str] = None
    dump_attention: Optional[str] = None
    metrics_csv: Optional[str] = None

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind not in KIND_CHOICES:
            raise ValueError(f"kind must be one of {', '.join(KIND_CHOICES)}, got {self.kind!r}")
        return self

    @classmethod
    def from_dict(cls, payload) -> "RunConfig":
        try:
            return cls.model_validate(payload)
        except ValidationError as e:
            raise InvalidArgumentError(f"invalid run configuration: {e}") from e

    def merged(self, overrides: dict) -> "RunConfig":
        """Re-validate with ``overrides`` (dotted keys allowed) applied on top."""
        payload = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            node = payload
            *parents, leaf = key.split(".")
            for part in parents:
                node = node.setdefault(part, {})
            node[leaf] = value
        return RunConfig.from_dict(payload)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


def load_run_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ImageIOError(path, str(e)) from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"{path}: not valid JSON ({e})") from e
    return RunConfig.from_dict(payload)

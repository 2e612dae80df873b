from __future__ import annotations

import logging
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from degrade.model import EPS_T, DegradationMatrices, apply_model
from degrade.scenes import cosine_field, generate_clean
from errors import InvalidArgumentError
from imaging.image import as_array

logger = logging.getLogger(__name__)


class DegradationKind(str, Enum):
    RAIN = "rain"
    HAZE = "haze"
    LOWLIGHT = "lowlight"


class RainParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    streak_density: float = Field(10.0 / 4096.0, ge=0.0, le=0.05, description="streaks per pixel")
    streak_count: Optional[int] = Field(None, ge=0, le=10_000, description="overrides streak_density")
    angle_deg: float = Field(10.0, ge=-60.0, le=60.0, description="tilt from vertical")
    length_px: float = Field(14.0, ge=2.0, le=256.0)
    intensity: float = Field(0.6, gt=0.0, le=1.0)
    width_sigma: float = Field(0.5, gt=0.0, le=3.0)
    cutoff_px: float = Field(0.9, gt=0.0, le=6.0)

    def count_for(self, height: int, width: int) -> int:
        if self.streak_count is not None:
            return self.streak_count
        return int(self.streak_density * height * width)


class HazeParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    atmospheric_light: float = Field(0.9, ge=0.7, le=1.0)
    depth_scale: float = Field(1.5, gt=0.0, le=6.0)


class LowLightParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma_exponent: float = Field(3.0, ge=2.0, le=5.0)
    spatial_smoothness: float = Field(1.0, ge=0.25, le=4.0, description="field period in image sizes")


class SimParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: DegradationKind
    seed: int = Field(0, ge=0)
    rain: RainParams = RainParams()
    haze: HazeParams = HazeParams()
    lowlight: LowLightParams = LowLightParams()

    @classmethod
    def from_dict(cls, payload) -> "SimParams":
        try:
            return cls.model_validate(payload)
        except ValidationError as e:
            raise InvalidArgumentError(f"invalid simulation parameters: {e}") from e

    def with_seed(self, seed) -> "SimParams":
        return self.model_copy(update={"seed": int(seed)})


LOWLIGHT_RANGE = (0.05, 0.5)


def _segment_distance(yy, xx, y0, x0, y1, x1):
    dy, dx = y1 - y0, x1 - x0
    length2 = dy * dy + dx * dx
    t = np.clip(((yy - y0) * dy + (xx - x0) * dx) / length2, 0.0, 1.0)
    return np.hypot(yy - (y0 + t * dy), xx - (x0 + t * dx))


def rain_streaks(height, width, params: RainParams, rng) -> np.ndarray:
    """Sparse map of anti-aliased line segments with a Gaussian cross profile."""
    streaks = np.zeros((height, width))
    reach = params.cutoff_px + 1.0
    for _ in range(params.count_for(height, width)):
        angle = np.deg2rad(params.angle_deg + rng.uniform(-3.0, 3.0))
        length = params.length_px * rng.uniform(0.8, 1.2)
        strength = params.intensity * rng.uniform(0.7, 1.0)
        cy, cx = rng.uniform(0, height), rng.uniform(0, width)
        half_dy, half_dx = 0.5 * length * np.cos(angle), 0.5 * length * np.sin(angle)
        y0, x0, y1, x1 = cy - half_dy, cx - half_dx, cy + half_dy, cx + half_dx
        top = max(int(np.floor(min(y0, y1) - reach)), 0)
        bottom = min(int(np.ceil(max(y0, y1) + reach)) + 1, height)
        left = max(int(np.floor(min(x0, x1) - reach)), 0)
        right = min(int(np.ceil(max(x0, x1) + reach)) + 1, width)
        if top >= bottom or left >= right:
            continue
        yy, xx = np.mgrid[top:bottom, left:right].astype(np.float64)
        distance = _segment_distance(yy, xx, y0, x0, y1, x1)
        profile = np.where(
            distance <= params.cutoff_px,
            strength * np.exp(-(distance ** 2) / (2.0 * params.width_sigma ** 2)),
            0.0,
        )
        window = streaks[top:bottom, left:right]
        np.maximum(window, profile, out=window)
    return streaks


def haze_transmission(height, width, params: HazeParams, rng) -> np.ndarray:
    depth = cosine_field(height, width, rng, components=3)
    return np.clip(np.exp(-params.depth_scale * depth), EPS_T, 1.0)


def lowlight_illumination(height, width, params: LowLightParams, rng) -> np.ndarray:
    period = params.spatial_smoothness * max(height, width)
    field = cosine_field(height, width, rng, components=3, min_period=period)
    lo, hi = LOWLIGHT_RANGE
    return lo + (hi - lo) * field ** params.gamma_exponent


def simulate_matrices(height, width, p: SimParams) -> DegradationMatrices:
    rng = np.random.default_rng(p.seed)
    shape = (height, width, 3)
    if p.kind is DegradationKind.RAIN:
        # O = B + R
        R = rain_streaks(height, width, p.rain, rng)
        return DegradationMatrices(np.ones(shape), np.broadcast_to(R[..., None], shape))
    if p.kind is DegradationKind.HAZE:
        # O = T B + (1 - T) A
        T = np.broadcast_to(haze_transmission(height, width, p.haze, rng)[..., None], shape)
        return DegradationMatrices(T, (1.0 - T) * p.haze.atmospheric_light)
    # O = I B
    illumination = lowlight_illumination(height, width, p.lowlight, rng)
    return DegradationMatrices(np.broadcast_to(illumination[..., None], shape), np.zeros(shape))


def simulate(B, p: SimParams):
    """Degrade a clean image with seeded synthetic matrices; returns (O, M)."""
    if not isinstance(p, SimParams):
        p = SimParams.from_dict(p)
    B = as_array(B)
    M = simulate_matrices(B.shape[0], B.shape[1], p)
    O = apply_model(B, M)
    logger.debug(f"Simulated {p.kind.value} (seed {p.seed}) on {B.shape[0]}x{B.shape[1]}")
    return O, M


REFERENCE_SEED_OFFSET = 10_000


def synthetic_case(kind, seed: int, size: int):
    """Generated target (O, B) plus a reference pair: same degradation matrices, different scene.

    Returns (O, B, (O_ref, B_ref), M).
    """
    M = simulate_matrices(size, size, SimParams(kind=DegradationKind(kind), seed=seed))
    B = generate_clean(size, size, seed)
    B_ref = generate_clean(size, size, seed + REFERENCE_SEED_OFFSET)
    return apply_model(B, M), B, (apply_model(B_ref, M), B_ref), M

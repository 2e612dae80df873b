"""Cursory (T₀, D₀) from classical single-image estimators, and the solver's starting state."""

from __future__ import annotations

import logging

import numpy as np
from scipy import ndimage

from config.settings import EstimateConfig
from degrade.model import DEFAULT_EPS, EPS_T, DegradationMatrices, invert_model
from degrade.simulate import DegradationKind
from estimate.classify import atmospheric_light, dark_channel, high_pass
from imaging.image import as_array, require_same_shape
from solver.state import SolverState

logger = logging.getLogger(__name__)

MIN_AIRLIGHT = 1e-3


def estimate_rain(O, cfg: EstimateConfig) -> DegradationMatrices:
    O = as_array(O)
    return DegradationMatrices(np.ones(O.shape), np.clip(high_pass(O, cfg.median_size), 0.0, 1.0))


def estimate_haze(O, cfg: EstimateConfig) -> DegradationMatrices:
    O = as_array(O)
    A = np.maximum(atmospheric_light(O, cfg), MIN_AIRLIGHT)
    transmission = 1.0 - cfg.omega * dark_channel(O / A, cfg.dark_channel_patch)
    T = np.broadcast_to(np.clip(transmission, EPS_T, 1.0)[..., None], O.shape)
    return DegradationMatrices(T, (1.0 - T) * A)


def estimate_lowlight(O, cfg: EstimateConfig) -> DegradationMatrices:
    O = as_array(O)
    sigma = O.shape[0] / cfg.illumination_sigma_divisor
    illumination = ndimage.gaussian_filter(O.max(axis=2), sigma=sigma, mode="nearest") / cfg.lowlight_reflectance
    T = np.broadcast_to(np.clip(illumination, EPS_T, 1.0)[..., None], O.shape)
    return DegradationMatrices(T, np.zeros(O.shape))


ESTIMATORS = {
    DegradationKind.RAIN: estimate_rain,
    DegradationKind.HAZE: estimate_haze,
    DegradationKind.LOWLIGHT: estimate_lowlight,
}


def estimate_initial(O, kind, cfg: EstimateConfig = EstimateConfig()) -> DegradationMatrices:
    kind = DegradationKind(kind)
    M0 = ESTIMATORS[kind](O, cfg)
    logger.debug(f"Initial {kind.value} matrices: mean T {M0.T.mean():.4f}, mean D {M0.D.mean():.4f}")
    return M0


def init_state(O, M0: DegradationMatrices, cursory: bool = False, eps: float = DEFAULT_EPS) -> SolverState:
    """B₀ = O (or the cursory inversion of O), Z₀ = B₀, P₀ = T₀, Q₀ = D₀, k = 0."""
    O = as_array(O)
    require_same_shape("init_state", O, M0.T, M0.D)
    B0 = as_array(invert_model(O, M0, eps)) if cursory else O
    return SolverState(B=B0, Z=B0, T=M0.T, D=M0.D, P=M0.T, Q=M0.D, k=0)

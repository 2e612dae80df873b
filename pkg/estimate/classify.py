"""Degradation-type selection from plain image statistics."""

from __future__ import annotations

import logging

import numpy as np
from scipy import ndimage

from config.settings import EstimateConfig
from degrade.simulate import DegradationKind
from imaging.image import as_array

logger = logging.getLogger(__name__)

LUMA = np.array([0.299, 0.587, 0.114])
ENERGY_FLOOR = 1e-4


def luminance(array: np.ndarray) -> np.ndarray:
    return array @ LUMA


def dark_channel(array, patch: int = 15) -> np.ndarray:
    """Min over channels, then min over a patch×patch neighbourhood."""
    array = as_array(array)
    return ndimage.minimum_filter(array.min(axis=2), size=patch, mode="nearest")


def atmospheric_light(O, cfg: EstimateConfig = EstimateConfig()) -> np.ndarray:
    """Per-channel mean of the pixels with the brightest dark channel."""
    O = as_array(O)
    dark = dark_channel(O, cfg.dark_channel_patch).ravel()
    count = max(1, int(np.ceil(cfg.brightest_fraction * dark.size)))
    brightest = np.argsort(dark, kind="stable")[-count:]
    return O.reshape(-1, 3)[brightest].mean(axis=0)


def high_pass(O, size: int = 5) -> np.ndarray:
    O = as_array(O)
    return O - ndimage.median_filter(O, size=(size, size, 1), mode="reflect")


def directional_energies(residual: np.ndarray) -> np.ndarray:
    """Mean squared unit-distance differences at 0°, 45°, 90° and 135°."""
    r = residual
    diagonal = np.sqrt(2.0)
    return np.array([
        np.mean((r[:, 1:] - r[:, :-1]) ** 2) if r.shape[1] > 1 else 0.0,
        np.mean(((r[1:, 1:] - r[:-1, :-1]) / diagonal) ** 2) if min(r.shape) > 1 else 0.0,
        np.mean((r[1:, :] - r[:-1, :]) ** 2) if r.shape[0] > 1 else 0.0,
        np.mean(((r[1:, :-1] - r[:-1, 1:]) / diagonal) ** 2) if min(r.shape) > 1 else 0.0,
    ])


def directional_energy_ratio(O, cfg: EstimateConfig = EstimateConfig()) -> float:
    """Strongest oriented high-frequency energy over the mean of all four orientations."""
    energies = directional_energies(luminance(high_pass(O, cfg.median_size)))
    return float(energies.max() / (energies.mean() + ENERGY_FLOOR))


def classify(O, cfg: EstimateConfig = EstimateConfig()) -> DegradationKind:
    O = as_array(O)
    mean_luma = float(luminance(O).mean())
    if mean_luma < cfg.lowlight_luminance:
        logger.debug(f"classify: mean luminance {mean_luma:.4f} -> lowlight")
        return DegradationKind.LOWLIGHT
    ratio = directional_energy_ratio(O, cfg)
    if ratio > cfg.rain_energy_ratio:
        logger.debug(f"classify: energy ratio {ratio:.3f} -> rain")
        return DegradationKind.RAIN
    dark_mean = float(dark_channel(O, cfg.dark_channel_patch).mean())
    if dark_mean > cfg.haze_dark_channel:
        logger.debug(f"classify: dark channel mean {dark_mean:.3f} -> haze")
    else:
        logger.debug(f"classify: no strong cue (ratio {ratio:.3f}, dark {dark_mean:.3f}) -> haze")
    return DegradationKind.HAZE

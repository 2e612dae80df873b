"""Seeded synthetic scenes: smooth random fields and colourful clean images."""

import numpy as np

from imaging.image import Image


def cosine_field(height, width, rng, components=3, min_period=None):
    """Sum of randomly oriented low-frequency cosines, normalised to [0, 1]."""
    if min_period is None:
        min_period = max(height, width)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    field = np.zeros((height, width))
    for _ in range(components):
        theta = rng.uniform(0.0, 2.0 * np.pi)
        period = rng.uniform(min_period, 2.0 * min_period)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amplitude = rng.uniform(0.5, 1.0)
        field += amplitude * np.cos(
            2.0 * np.pi * (xx * np.cos(theta) + yy * np.sin(theta)) / period + phase
        )
    lo, hi = field.min(), field.max()
    if hi - lo < 1e-12:
        return np.full((height, width), 0.5)
    return (field - lo) / (hi - lo)


def saturated_color(rng):
    """An RGB colour with one dark channel, so every region has a dark-channel pixel."""
    color = rng.uniform(0.45, 0.95, size=3)
    color[rng.integers(3)] = rng.uniform(0.02, 0.15)
    return color


def generate_clean(height, width, seed):
    """Piecewise-smooth scene: shaded background plus saturated discs and rectangles."""
    rng = np.random.default_rng(seed)
    shading = 0.85 + 0.15 * cosine_field(height, width, rng)
    canvas = np.broadcast_to(saturated_color(rng), (height, width, 3)).copy()
    yy, xx = np.mgrid[0:height, 0:width]
    scale = min(height, width)
    for _ in range(int(rng.integers(4, 8))):
        color = saturated_color(rng)
        cy, cx = rng.uniform(0, height), rng.uniform(0, width)
        if rng.random() < 0.5:
            radius = rng.uniform(0.1, 0.3) * scale
            mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= radius ** 2
        else:
            half_h = rng.uniform(0.08, 0.25) * scale
            half_w = half_h * rng.uniform(0.8, 1.25)
            mask = (np.abs(yy - cy) <= half_h) & (np.abs(xx - cx) <= half_w)
        canvas[mask] = color
    return Image(np.clip(canvas * shading[..., None], 0.0, 1.0))

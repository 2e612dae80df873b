import numpy as np
from skimage.metrics import structural_similarity

from errors import InvalidArgumentError
from imaging.image import as_array, require_same_shape

PSNR_CAP = 100.0
SSIM_MIN_SIDE = 11


def psnr(x, y) -> float:
    """10·log10(1/MSE) in dB over all channels, capped at 100 dB (identical images)."""
    x, y = as_array(x), as_array(y)
    require_same_shape("psnr", x, y)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(1.0 / mse))


def ssim(x, y) -> float:
    """Mean SSIM, 11×11 Gaussian window (σ=1.5), K1=0.01, K2=0.03, range 1, channels averaged."""
    x, y = as_array(x), as_array(y)
    require_same_shape("ssim", x, y)
    if min(x.shape[:2]) < SSIM_MIN_SIDE:
        raise InvalidArgumentError(f"ssim needs images of at least {SSIM_MIN_SIDE}x{SSIM_MIN_SIDE}, got {x.shape[:2]}")
    return float(structural_similarity(
        x,
        y,
        gaussian_weights=True,
        sigma=1.5,
        use_sample_covariance=False,
        data_range=1.0,
        channel_axis=-1,
    ))

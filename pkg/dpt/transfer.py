"""Degradation prior transmitter.

Maps reference-oriented matrices (T̂, D̂) onto the target image: pooled patch
features of B_k query pooled features of B_ref, the softmax weights mix the
pooled reference matrices, and the result is upsampled and blended with the
previous matrices.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

from config.settings import DptConfig, DptMode
from degrade.model import EPS_T
from errors import InvalidArgumentError, ShapeMismatchError
from imaging.image import FeatureGrid, as_array, downsample_avg, pool_patches, upsample_bilinear

logger = logging.getLogger(__name__)


def extract_features(img, patch: int) -> FeatureGrid:
    return downsample_avg(img, patch)


def attention(f_tgt: np.ndarray, f_ref: np.ndarray, tau: float) -> np.ndarray:
    """Row-stochastic n_tgt×n_ref matrix softmax_j(−||f_tgt[i] − f_ref[j]||² / τ)."""
    if not tau > 0:
        raise InvalidArgumentError(f"tau must be > 0, got {tau}")
    f_tgt = np.atleast_2d(np.asarray(f_tgt, dtype=np.float64))
    f_ref = np.atleast_2d(np.asarray(f_ref, dtype=np.float64))
    if f_tgt.shape[1] != f_ref.shape[1]:
        raise ShapeMismatchError("attention features", f_tgt.shape, f_ref.shape)
    return softmax(-cdist(f_tgt, f_ref, "sqeuclidean") / tau, axis=1)


def _nearest_cells(n_tgt: int, n_ref: int) -> np.ndarray:
    if n_tgt == 1:
        return np.zeros(1, dtype=int)
    return np.rint(np.linspace(0.0, n_ref - 1, n_tgt)).astype(int)


def direct_weights(tgt: FeatureGrid, ref: FeatureGrid) -> np.ndarray:
    """One-hot weights sending each target cell to the reference cell at the same relative position."""
    rows = _nearest_cells(tgt.rows, ref.rows)
    cols = _nearest_cells(tgt.cols, ref.cols)
    source = (rows[:, None] * ref.cols + cols[None, :]).ravel()
    weights = np.zeros((tgt.rows * tgt.cols, ref.rows * ref.cols))
    weights[np.arange(source.size), source] = 1.0
    return weights


def transfer(That, Dhat, B_k, B_ref, T_prev, D_prev, cfg: DptConfig = DptConfig(), return_attention=False):
    That, Dhat = as_array(That), as_array(Dhat)
    B_k, B_ref = as_array(B_k), as_array(B_ref)
    T_prev, D_prev = as_array(T_prev), as_array(D_prev)
    if That.shape != B_ref.shape or Dhat.shape != B_ref.shape:
        raise ShapeMismatchError("transfer reference side", That.shape, Dhat.shape, B_ref.shape)
    if T_prev.shape != B_k.shape or D_prev.shape != B_k.shape:
        raise ShapeMismatchError("transfer target side", T_prev.shape, D_prev.shape, B_k.shape)

    f_tgt = extract_features(B_k, cfg.patch)
    f_ref = extract_features(B_ref, cfg.patch)
    if cfg.mode is DptMode.DIRECT:
        weights = direct_weights(f_tgt, f_ref)
    else:
        weights = attention(f_tgt.vectors(), f_ref.vectors(), cfg.tau)

    grid_shape = (f_tgt.rows, f_tgt.cols, -1)
    T_grid = (weights @ pool_patches(That, cfg.patch).reshape(-1, That.shape[2])).reshape(grid_shape)
    D_grid = (weights @ pool_patches(Dhat, cfg.patch).reshape(-1, Dhat.shape[2])).reshape(grid_shape)
    T_tr = upsample_bilinear(T_grid, B_k.shape, cfg.patch)
    D_tr = upsample_bilinear(D_grid, B_k.shape, cfg.patch)

    rho = cfg.rho
    T_k = np.clip((1.0 - rho) * T_prev + rho * T_tr, EPS_T, 1.0)
    D_k = np.clip((1.0 - rho) * D_prev + rho * D_tr, -1.0, 1.0)
    logger.debug(
        f"DPT {cfg.mode.value}: {weights.shape[0]}x{weights.shape[1]} weights, "
        f"mean peak {weights.max(axis=1).mean():.3f}"
    )
    if return_attention:
        return T_k, D_k, weights
    return T_k, D_k

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from errors import InvalidArgumentError, ShapeMismatchError
from imaging.image import Image, as_array

EPS_T = 1e-3
DEFAULT_EPS = 1e-5


def _readonly(array) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DegradationMatrices:
    """Transmission map T (multiplicative) and degradation map D (additive) of O = T∘B + D."""

    T: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        T = _readonly(self.T)
        D = _readonly(self.D)
        if T.shape != D.shape:
            raise ShapeMismatchError("DegradationMatrices T/D", T.shape, D.shape)
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(D))):
            raise InvalidArgumentError("DegradationMatrices contain NaN or Inf")
        if T.size and (T.min() < EPS_T or T.max() > 1.0):
            raise InvalidArgumentError(f"T outside [{EPS_T}, 1]: [{T.min():.4g}, {T.max():.4g}]")
        if D.size and (D.min() < -1.0 or D.max() > 1.0):
            raise InvalidArgumentError(f"D outside [-1, 1]: [{D.min():.4g}, {D.max():.4g}]")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "D", D)

    @classmethod
    def clamped(cls, T, D) -> "DegradationMatrices":
        return cls(np.clip(T, EPS_T, 1.0), np.clip(D, -1.0, 1.0))

    @classmethod
    def identity(cls, shape) -> "DegradationMatrices":
        return cls(np.ones(shape), np.zeros(shape))

    @property
    def shape(self):
        return self.T.shape


def _broadcast_to_image(what, target: np.ndarray, *arrays: np.ndarray):
    for array in arrays:
        try:
            shape = np.broadcast_shapes(target.shape, array.shape)
        except ValueError:
            raise ShapeMismatchError(what, target.shape, array.shape) from None
        if shape != target.shape:
            raise ShapeMismatchError(what, target.shape, array.shape)


def compose(B: np.ndarray, T: np.ndarray, D: np.ndarray) -> np.ndarray:
    """T∘B + D without the final clamp (the forward model proper)."""
    return T * B + D


def apply_model(B, M: DegradationMatrices) -> Image:
    B = as_array(B)
    _broadcast_to_image("apply_model", B, M.T, M.D)
    return Image(np.clip(compose(B, M.T, M.D), 0.0, 1.0))


def invert_model(O, M: DegradationMatrices, eps: float = DEFAULT_EPS) -> Image:
    """The cursory clean image (O − D) ÷ (T + eps), clamped to [0, 1]."""
    if not eps > 0:
        raise InvalidArgumentError(f"eps must be > 0, got {eps}")
    O = as_array(O)
    _broadcast_to_image("invert_model", O, M.T, M.D)
    return Image(np.clip((O - M.D) / (M.T + eps), 0.0, 1.0))

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import ndimage
from skimage.transform import resize

from errors import InvalidArgumentError, ShapeMismatchError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Image:
    """H×W×3 float64 intensities. Read-only once built."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or data.shape[2] != 3:
            raise InvalidArgumentError(f"Image needs shape H×W×3, got {data.shape}")
        if data.shape[0] == 0 or data.shape[1] == 0:
            raise InvalidArgumentError(f"Image has a zero dimension: {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("Image contains NaN or Inf")
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def full(cls, height: int, width: int, value) -> "Image":
        return cls(np.broadcast_to(np.asarray(value, dtype=np.float64), (height, width, 3)))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def clamped(self) -> "Image":
        return Image(np.clip(self.data, 0.0, 1.0))

    def transposed(self) -> "Image":
        return Image(self.data.transpose(1, 0, 2))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __repr__(self):
        return f"Image({self.height}x{self.width})"


ArrayLike = Union[Image, np.ndarray]


def as_array(x: ArrayLike) -> np.ndarray:
    if isinstance(x, Image):
        return x.data
    return np.asarray(x, dtype=np.float64)


def require_same_shape(what: str, *arrays: np.ndarray):
    shapes = {a.shape for a in arrays}
    if len(shapes) > 1:
        raise ShapeMismatchError(what, *[a.shape for a in arrays])


@dataclass(frozen=True, eq=False)
class FeatureGrid:
    """Patch-level features: rows×cols×dim, one vector per image patch."""

    data: np.ndarray
    patch: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.data)):
            raise InvalidArgumentError("FeatureGrid contains NaN or Inf")
        object.__setattr__(self, "data", _frozen(self.data))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def dim(self) -> int:
        return self.data.shape[2]

    def vectors(self) -> np.ndarray:
        """Row-major (rows*cols)×dim view, the order attention indexes patches in."""
        return self.data.reshape(-1, self.dim)


def _check_patch(patch) -> int:
    if isinstance(patch, bool) or int(patch) != patch or patch < 1:
        raise InvalidArgumentError(f"patch must be a positive integer, got {patch!r}")
    return int(patch)


def _block_starts(length: int, patch: int) -> np.ndarray:
    return np.arange(0, length, patch)


def pool_patches(array: np.ndarray, patch: int) -> np.ndarray:
    """Per-channel means over patch×patch blocks; edge blocks average their true pixel count."""
    patch = _check_patch(patch)
    array = np.asarray(array, dtype=np.float64)
    squeeze = array.ndim == 2
    if squeeze:
        array = array[..., None]
    height, width = array.shape[:2]
    row_starts = _block_starts(height, patch)
    col_starts = _block_starts(width, patch)
    sums = np.add.reduceat(np.add.reduceat(array, row_starts, axis=0), col_starts, axis=1)
    row_counts = np.diff(np.append(row_starts, height))
    col_counts = np.diff(np.append(col_starts, width))
    means = sums / (row_counts[:, None] * col_counts[None, :])[..., None]
    return means[..., 0] if squeeze else means


def downsample_avg(img: ArrayLike, patch: int) -> FeatureGrid:
    patch = _check_patch(patch)
    return FeatureGrid(pool_patches(as_array(img), patch), patch)


def _patch_centers(length: int, patch: int) -> np.ndarray:
    starts = _block_starts(length, patch)
    ends = np.minimum(starts + patch, length)
    return (starts + ends - 1) / 2.0


def upsample_bilinear(grid: np.ndarray, shape: tuple, patch: int) -> np.ndarray:
    """Bilinear interpolation of a patch grid back to pixels.

    Grid values sit at the true centres of their (possibly truncated) patches;
    pixels outside the outermost centres take the edge value.
    """
    patch = _check_patch(patch)
    grid = np.asarray(grid, dtype=np.float64)
    height, width = shape[:2]
    rows, cols = grid.shape[:2]
    if rows != -(-height // patch) or cols != -(-width // patch):
        raise ShapeMismatchError("upsample grid", grid.shape[:2], (height, width))
    fy = np.interp(np.arange(height), _patch_centers(height, patch), np.arange(rows))
    fx = np.interp(np.arange(width), _patch_centers(width, patch), np.arange(cols))
    yy, xx = np.meshgrid(fy, fx, indexing="ij")
    channels = [
        ndimage.map_coordinates(grid[..., c], [yy, xx], order=1, mode="nearest")
        for c in range(grid.shape[2])
    ]
    return np.stack(channels, axis=-1)


def broadcast_operands(what: str, *values) -> list:
    """float64 arrays of the values; scalars broadcast, everything else must share one shape."""
    arrays = [as_array(v) for v in values]
    shapes = {a.shape for a in arrays if a.ndim > 0}
    if len(shapes) > 1:
        raise ShapeMismatchError(what, *[a.shape for a in arrays if a.ndim > 0])
    return arrays


def resize_bilinear(array: ArrayLike, shape: tuple) -> np.ndarray:
    """Bilinear resample of an H×W×C array to shape[:2]."""
    array = as_array(array)
    target = (int(shape[0]), int(shape[1])) + array.shape[2:]
    return resize(array, target, order=1, mode="edge", anti_aliasing=False, preserve_range=True)

import numpy as np
import pytest

from errors import InvalidArgumentError, ShapeMismatchError
from imaging.image import (
    Image,
    broadcast_operands,
    downsample_avg,
    pool_patches,
    resize_bilinear,
    upsample_bilinear,
)


def test_image_is_read_only_copy():
    data = np.full((4, 5, 3), 0.25)
    img = Image(data)
    data[0, 0, 0] = 1.0
    assert img.data[0, 0, 0] == 0.25
    with pytest.raises(ValueError):
        img.data[0, 0, 0] = 0.5
    assert (img.height, img.width) == (4, 5)


@pytest.mark.parametrize("shape", [(4, 4), (4, 4, 1), (0, 4, 3), (4, 0, 3)])
def test_image_rejects_bad_shapes(shape):
    with pytest.raises(InvalidArgumentError):
        Image(np.zeros(shape))


def test_image_rejects_nan():
    data = np.zeros((2, 2, 3))
    data[1, 1, 2] = np.nan
    with pytest.raises(InvalidArgumentError):
        Image(data)


def test_pool_patches_truncated_edges_use_true_counts():
    array = np.arange(5 * 5, dtype=float).reshape(5, 5)
    pooled = pool_patches(array, 4)
    assert pooled.shape == (2, 2)
    assert pooled[0, 0] == pytest.approx(array[:4, :4].mean())
    assert pooled[0, 1] == pytest.approx(array[:4, 4:].mean())
    assert pooled[1, 1] == pytest.approx(array[4, 4])


@pytest.mark.parametrize("patch", [0, -1, 1.5, True])
def test_pool_patches_rejects_bad_patch(patch):
    with pytest.raises(InvalidArgumentError):
        pool_patches(np.zeros((4, 4, 3)), patch)


def test_downsample_avg_feature_grid(rng):
    img = rng.uniform(size=(20, 12, 3))
    grid = downsample_avg(img, 8)
    assert (grid.rows, grid.cols, grid.dim) == (3, 2, 3)
    assert grid.vectors().shape == (6, 3)


def test_upsample_constant_grid_is_constant():
    grid = np.full((3, 2, 3), 0.4)
    out = upsample_bilinear(grid, (20, 12, 3), 8)
    assert out.shape == (20, 12, 3)
    np.testing.assert_allclose(out, 0.4, atol=1e-15)


def test_upsample_hits_grid_values_at_patch_centres():
    grid = np.array([[0.0, 1.0]])[..., None].repeat(3, axis=2)
    out = upsample_bilinear(grid, (4, 8, 3), 4)
    # centres sit at column 1.5 and 5.5; pixels outside them take the edge value
    assert out[0, 0, 0] == pytest.approx(0.0)
    assert out[0, 7, 0] == pytest.approx(1.0)
    assert out[0, 3, 0] == pytest.approx(0.375)


def test_upsample_rejects_wrong_grid():
    with pytest.raises(ShapeMismatchError):
        upsample_bilinear(np.zeros((2, 2, 3)), (20, 12, 3), 8)


def test_broadcast_operands_allows_scalars_only():
    a, b, c = broadcast_operands("test", np.ones((2, 2)), 0.5, np.zeros((2, 2)))
    assert b.shape == ()
    with pytest.raises(ShapeMismatchError):
        broadcast_operands("test", np.ones((2, 2)), np.ones((2, 3)))


def test_resize_bilinear_shape_and_constant():
    out = resize_bilinear(np.full((10, 6, 3), 0.3), (16, 16))
    assert out.shape == (16, 16, 3)
    np.testing.assert_allclose(out, 0.3, atol=1e-12)

from imaging.image import (
    FeatureGrid,
    Image,
    as_array,
    broadcast_operands,
    downsample_avg,
    pool_patches,
    require_same_shape,
    resize_bilinear,
    upsample_bilinear,
)
from imaging.io import ensure_dir, list_images, load_image, quantize, save_image

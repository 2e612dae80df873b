import logging
import os
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from errors import (
    ImageWriteError,
    UnreadableImageError,
    UnsupportedFormatError,
    ZeroDimensionError,
)
from imaging.image import Image
from utils import atomic_write

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = {"PNG", "PPM"}
SAVE_FORMATS = {".png": "PNG", ".ppm": "PPM"}
PPM_MAGICS = (b"P1", b"P2", b"P3", b"P4", b"P5", b"P6", b"P7")


def _header_tokens(fh, count):
    """First ``count`` header tokens after the magic number, skipping # comments."""
    tokens, current, in_comment = [], b"", False
    while len(tokens) < count:
        byte = fh.read(1)
        if not byte:
            break
        if in_comment:
            in_comment = byte not in b"\r\n"
        elif byte == b"#" or byte.isspace():
            in_comment = byte == b"#"
            if current:
                tokens.append(current)
                current = b""
        else:
            current += byte
    return tokens


def _ppm_size(path):
    """(width, height) from a P6 header, or None when the file is not a PPM at all."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
        if magic not in PPM_MAGICS:
            return None
        if magic != b"P6":
            raise UnsupportedFormatError(path, f"only binary P6 PPM is supported, got {magic.decode()}")
        tokens = _header_tokens(fh, 2)
    if len(tokens) < 2 or not all(t.isdigit() for t in tokens):
        raise UnsupportedFormatError(path, "truncated PPM header")
    return int(tokens[0]), int(tokens[1])


def load_image(path) -> Image:
    path = Path(path)
    if not path.is_file():
        raise UnreadableImageError(path, "no such file")
    try:
        size = _ppm_size(path)
    except PermissionError as e:
        raise UnreadableImageError(path, str(e)) from e
    if size is not None and 0 in size:
        raise ZeroDimensionError(path)
    try:
        with PILImage.open(path) as pil:
            fmt = pil.format
            if fmt not in SUPPORTED_FORMATS:
                raise UnsupportedFormatError(path, f"format {fmt}")
            # PGM/PBM also report as PPM; only binary RGB (P6) is accepted
            if fmt == "PPM" and pil.mode != "RGB":
                raise UnsupportedFormatError(path, f"PPM mode {pil.mode}")
            if pil.width == 0 or pil.height == 0:
                raise ZeroDimensionError(path)
            pil.load()
            rgb = pil.convert("RGB") if pil.mode != "RGB" else pil
            raw = np.asarray(rgb, dtype=np.uint8)
    except (UnsupportedFormatError, ZeroDimensionError):
        raise
    except PermissionError as e:
        raise UnreadableImageError(path, str(e)) from e
    except (UnidentifiedImageError, SyntaxError, ValueError, EOFError, OSError) as e:
        raise UnsupportedFormatError(path, str(e)) from e
    if raw.ndim != 3 or 0 in raw.shape:
        raise ZeroDimensionError(path)
    logger.debug(f"Loaded {path} ({raw.shape[0]}x{raw.shape[1]}, {fmt})")
    return Image(raw.astype(np.float64) / 255.0)


def quantize(data: np.ndarray) -> np.ndarray:
    """round(v*255) with halves rounded up, clamped to [0, 255]."""
    return np.clip(np.floor(np.asarray(data, dtype=np.float64) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def save_image(img, path):
    path = Path(path)
    fmt = SAVE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise UnsupportedFormatError(path, f"cannot save '{path.suffix}' files")
    data = img.data if isinstance(img, Image) else np.asarray(img)
    pil = PILImage.fromarray(quantize(data))
    try:
        atomic_write(path, lambda fh: pil.save(fh, format=fmt))
    except OSError as e:
        raise ImageWriteError(path, str(e)) from e
    logger.debug(f"Saved {path}")
    return path


def list_images(directory):
    directory = Path(directory)
    if not directory.is_dir():
        raise UnreadableImageError(directory, "not a directory")
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in SAVE_FORMATS and not p.name.startswith(".")
    )


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ImageWriteError(path, str(e)) from e
    return Path(path)

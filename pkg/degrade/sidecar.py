"""DRMTD1 sidecar: magic, H, W (little-endian uint32), then T and D as little-endian float64 H×W×3."""

from pathlib import Path

import numpy as np

from degrade.model import DegradationMatrices
from errors import ImageWriteError, UnreadableImageError, UnsupportedFormatError
from utils import atomic_write

MAGIC = b"DRMTD1"
HEADER_BYTES = len(MAGIC) + 8


def encode_matrices(M: DegradationMatrices) -> bytes:
    T = np.broadcast_to(M.T, M.shape)
    if T.ndim != 3 or T.shape[2] != 3:
        raise UnsupportedFormatError("<matrices>", f"sidecar needs H×W×3 matrices, got {T.shape}")
    height, width = T.shape[:2]
    header = MAGIC + np.array([height, width], dtype="<u4").tobytes()
    return (
        header
        + np.ascontiguousarray(M.T, dtype="<f8").tobytes()
        + np.ascontiguousarray(M.D, dtype="<f8").tobytes()
    )


def decode_matrices(payload: bytes, source="<bytes>") -> DegradationMatrices:
    if len(payload) < HEADER_BYTES or not payload.startswith(MAGIC):
        raise UnsupportedFormatError(source, "missing DRMTD1 header")
    height, width = (int(v) for v in np.frombuffer(payload[len(MAGIC):HEADER_BYTES], dtype="<u4"))
    count = height * width * 3
    body = np.frombuffer(payload[HEADER_BYTES:], dtype="<f8")
    if body.size != 2 * count:
        raise UnsupportedFormatError(source, f"expected {2 * count} values, found {body.size}")
    shape = (height, width, 3)
    return DegradationMatrices(body[:count].reshape(shape), body[count:].reshape(shape))


def write_matrices(path, M: DegradationMatrices):
    payload = encode_matrices(M)
    try:
        return atomic_write(Path(path), lambda fh: fh.write(payload))
    except OSError as e:
        raise ImageWriteError(path, str(e)) from e


def read_matrices(path) -> DegradationMatrices:
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as e:
        raise UnreadableImageError(path, str(e)) from e
    return decode_matrices(payload, source=path)

"""Binary vector container (.zgv) and PNG export.

The container is a 16-byte header -- magic ``ZGV1``, u32 little-endian
length, two reserved u32 words -- followed by N little-endian float32
values. PNG export is lossy (8 bits per channel) and export-only.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"ZGV1"
_HEADER = struct.Struct("<4sIII")


def write_zgv(path, x) -> None:
    x = np.asarray(x, dtype=np.float64).ravel()
    data = x.astype("<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, x.size, 0, 0))
        fh.write(data)


def read_zgv(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("truncated zgv file")
    magic, n, _, _ = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError("bad magic; not a zgv file")
    body = raw[_HEADER.size:]
    if len(body) != 4 * n:
        raise ValueError("zgv payload length mismatch")
    return np.frombuffer(body, dtype="<f4").astype(np.float64)


def export_png(path, x, shape) -> None:
    """Map [0,1] floats to 8-bit with round-half-even and save as PNG."""
    from PIL import Image

    arr = np.asarray(x, dtype=np.float64).reshape(shape)
    pix = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    if pix.ndim == 3 and pix.shape[2] == 1:
        pix = pix[:, :, 0]
    Image.fromarray(pix).save(path, format="PNG")

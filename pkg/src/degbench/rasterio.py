"""Raster file I/O: PNG/JPEG via Pillow, NPY via numpy.

All loads normalize to float64 in [0, 1]; 8-bit PNG saves quantize with
round-half-up so load(save(x)) is stable for 8-bit sources.
"""

from __future__ import annotations

import hashlib
import io
from pathlib import Path

import numpy as np
from PIL import Image as PILImage


def load_raster(path: str | Path) -> np.ndarray:
    """Read an image file as float64 pixels in [0, 1], (H, W) or (H, W, 3)."""
    path = Path(path)
    if path.suffix.lower() == ".npy":
        arr = np.asarray(np.load(path), dtype=np.float64)
        if arr.ndim == 3 and arr.shape[2] == 1:
            arr = arr[:, :, 0]
        return np.clip(arr, 0.0, 1.0)
    with PILImage.open(path) as im:
        return _from_pil(im)


def _from_pil(im: PILImage.Image) -> np.ndarray:
    if im.mode in ("I;16", "I;16B", "I;16L"):
        return np.asarray(im, dtype=np.float64) / 65535.0
    if im.mode == "I":
        return np.asarray(im, dtype=np.float64) / 65535.0
    if im.mode == "L":
        return np.asarray(im, dtype=np.float64) / 255.0
    if im.mode != "RGB":
        im = im.convert("RGB")
    return np.asarray(im, dtype=np.float64) / 255.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def save_png(path: str | Path, img: np.ndarray) -> None:
    """Write an 8-bit PNG (grayscale or RGB)."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(to_uint8(img)).save(path, format="PNG")


def encode_png(img: np.ndarray) -> bytes:
    """8-bit PNG bytes of a [0, 1] raster, for HTTP responses."""
    buf = io.BytesIO()
    PILImage.fromarray(to_uint8(img)).save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    with PILImage.open(io.BytesIO(data)) as im:
        return _from_pil(im)


def pixel_digest(img: np.ndarray) -> str:
    """Content hash of the quantized pixels; stable across encoders."""
    q = to_uint8(img)
    h = hashlib.sha256()
    h.update(str(q.shape).encode())
    h.update(q.tobytes())
    return h.hexdigest()

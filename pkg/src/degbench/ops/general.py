"""The nine cross-modality degradation operators.

Noise, blurs, resolution loss, intensity jitter, and in-plane motion. All
operators preserve raster shape and the [0, 1] range; randomized ones are
bit-reproducible under a fixed seed.
"""

from __future__ import annotations

import numpy as np

from .common import (
    as_float,
    bilinear_sample,
    clamp01,
    correlate1d,
    correlate2d,
    rotate_bilinear,
)


def gaussian_noise(img: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise per pixel, clamped to [0, 1]."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    img = as_float(img)
    if sigma == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return clamp01(img + rng.normal(0.0, sigma, size=img.shape))


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable convolution with a normalized Gaussian of radius ceil(3*sigma)."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    img = as_float(img)
    if sigma == 0:
        return img.copy()
    k = _gaussian_kernel(sigma)
    out = correlate1d(img, k, axis=0)
    out = correlate1d(out, k, axis=1)
    return clamp01(out)


def line_kernel(length_px: int, angle_deg: float) -> np.ndarray:
    """Unit-sum line kernel of the given pixel length and direction."""
    length = int(length_px)
    if length <= 1:
        return np.ones((1, 1), dtype=np.float64)
    side = length if length % 2 == 1 else length + 1
    kernel = np.zeros((side, side), dtype=np.float64)
    center = (side - 1) / 2.0
    theta = np.deg2rad(angle_deg)
    dc, dr = np.cos(theta), -np.sin(theta)
    ts = np.arange(length, dtype=np.float64) - (length - 1) / 2.0
    rows = center + ts * dr
    cols = center + ts * dc
    r0 = np.floor(rows).astype(int)
    c0 = np.floor(cols).astype(int)
    fr = rows - r0
    fc = cols - c0
    for w, rr, cc in (
        ((1 - fr) * (1 - fc), r0, c0),
        ((1 - fr) * fc, r0, c0 + 1),
        (fr * (1 - fc), r0 + 1, c0),
        (fr * fc, r0 + 1, c0 + 1),
    ):
        np.add.at(kernel, (np.clip(rr, 0, side - 1), np.clip(cc, 0, side - 1)), w)
    return kernel / kernel.sum()


def motion_blur(img: np.ndarray, length_px: int, angle_deg: float) -> np.ndarray:
    """Directional blur: convolution with a unit-sum line kernel."""
    if length_px < 1:
        raise ValueError(f"length must be >= 1, got {length_px}")
    img = as_float(img)
    if int(length_px) <= 1:
        return img.copy()
    kernel = line_kernel(length_px, angle_deg)
    return clamp01(correlate2d(img, kernel))


def low_resolution(img: np.ndarray, factor: int) -> np.ndarray:
    """Box-downsample by an integer factor, then bilinear-upsample back."""
    factor = int(factor)
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    img = as_float(img)
    h, w = img.shape[:2]
    if factor > min(h, w) / 4:
        raise ValueError(f"factor {factor} exceeds min(H, W)/4 = {min(h, w) / 4}")
    if factor == 1:
        return img.copy()

    pad_h = (-h) % factor
    pad_w = (-w) % factor
    pad = [(0, pad_h), (0, pad_w)] + [(0, 0)] * (img.ndim - 2)
    padded = np.pad(img, pad, mode="edge")
    ph, pw = padded.shape[:2]
    if img.ndim == 2:
        small = padded.reshape(ph // factor, factor, pw // factor, factor).mean(axis=(1, 3))
    else:
        small = padded.reshape(ph // factor, factor, pw // factor, factor, 3).mean(axis=(1, 3))

    sh, sw = small.shape[:2]
    rows = (np.arange(h, dtype=np.float64) + 0.5) / factor - 0.5
    cols = (np.arange(w, dtype=np.float64) + 0.5) / factor - 0.5
    rows = np.clip(rows, 0.0, sh - 1.0)
    cols = np.clip(cols, 0.0, sw - 1.0)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return clamp01(bilinear_sample(small, rr, cc))


def adjust_brightness(img: np.ndarray, delta: float) -> np.ndarray:
    """Uniform intensity shift, clamped."""
    if abs(delta) > 1:
        raise ValueError(f"|delta| must be <= 1, got {delta}")
    img = as_float(img)
    if delta == 0:
        return img.copy()
    return clamp01(img + delta)


def gamma_exposure(img: np.ndarray, gamma: float) -> np.ndarray:
    """Pointwise power-law exposure change: out = in ** gamma."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    img = as_float(img)
    if gamma == 1:
        return img.copy()
    return clamp01(np.power(img, gamma))


def reduce_contrast(img: np.ndarray, alpha: float) -> np.ndarray:
    """Compress dynamic range toward the per-channel mean by factor alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    img = as_float(img)
    if alpha == 1:
        return img.copy()
    if img.ndim == 2:
        mu = img.mean()
    else:
        mu = img.mean(axis=(0, 1), keepdims=True)
    return clamp01(mu + alpha * (img - mu))


def rotate_image(img: np.ndarray, degrees: float, fill: float = 0.0) -> np.ndarray:
    """In-plane rotation about the raster center, bilinear, size-preserving.

    Exact index permutation for square rasters at multiples of 90 degrees.
    """
    img = as_float(img)
    d = float(degrees) % 360.0
    if d > 180.0:
        d -= 360.0
    if d == 0.0:
        return img.copy()
    h, w = img.shape[:2]
    if h == w and d % 90.0 == 0.0:
        return np.rot90(img, k=int(d // 90) % 4, axes=(0, 1)).copy()
    return clamp01(rotate_bilinear(img, d, fill=fill))


def translate_image(img: np.ndarray, dx_px: float, dy_px: float, fill: float = 0.0) -> np.ndarray:
    """Shift content by (dx, dy) pixels; vacated pixels take the fill value."""
    img = as_float(img)
    h, w = img.shape[:2]
    if abs(dx_px) >= w or abs(dy_px) >= h:
        raise ValueError(f"shift ({dx_px}, {dy_px}) out of range for {h}x{w}")
    if dx_px == 0 and dy_px == 0:
        return img.copy()
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    return clamp01(bilinear_sample(img, rr - dy_px, cc - dx_px, fill=fill))

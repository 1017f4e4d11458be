"""Shared raster primitives: clamping, luminance, bilinear sampling, PSNR.

Everything here is pure numpy on float64 arrays shaped (H, W) or (H, W, 3).
"""

from __future__ import annotations

import numpy as np

# Rec. 601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])


def clamp01(img: np.ndarray) -> np.ndarray:
    return np.clip(img, 0.0, 1.0)


def as_float(img: np.ndarray) -> np.ndarray:
    return np.asarray(img, dtype=np.float64)


def is_rgb(img: np.ndarray) -> bool:
    return img.ndim == 3


def luminance(img: np.ndarray) -> np.ndarray:
    """Collapse RGB to grayscale; grayscale passes through unchanged."""
    img = as_float(img)
    if img.ndim == 2:
        return img
    return img @ _LUMA


def psnr(reference: np.ndarray, test: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical rasters."""
    reference = as_float(reference)
    test = as_float(test)
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * float(np.log10(peak * peak / mse))


def bilinear_sample(
    img: np.ndarray, rows: np.ndarray, cols: np.ndarray, fill: float = 0.0
) -> np.ndarray:
    """Sample ``img`` at fractional (row, col) positions with bilinear weights.

    Positions outside the raster contribute the fill value. Integer positions
    reproduce source pixels exactly. RGB images are sampled per channel.
    """
    img = as_float(img)
    rows = np.asarray(rows, dtype=np.float64)
    cols = np.asarray(cols, dtype=np.float64)
    h, w = img.shape[:2]

    r0 = np.floor(rows).astype(np.int64)
    c0 = np.floor(cols).astype(np.int64)
    fr = rows - r0
    fc = cols - c0

    out_shape = rows.shape if img.ndim == 2 else rows.shape + (img.shape[2],)
    out = np.zeros(out_shape, dtype=np.float64)
    weights = (
        ((1.0 - fr) * (1.0 - fc), r0, c0),
        ((1.0 - fr) * fc, r0, c0 + 1),
        (fr * (1.0 - fc), r0 + 1, c0),
        (fr * fc, r0 + 1, c0 + 1),
    )
    for weight, rr, cc in weights:
        inside = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
        rs = np.clip(rr, 0, h - 1)
        cs = np.clip(cc, 0, w - 1)
        vals = img[rs, cs]
        if img.ndim == 2:
            vals = np.where(inside, vals, fill)
            out += weight * vals
        else:
            vals = np.where(inside[..., None], vals, fill)
            out += weight[..., None] * vals
    return out


def rotate_bilinear(
    img: np.ndarray,
    degrees: float,
    fill: float = 0.0,
    pivot: tuple[float, float] | None = None,
) -> np.ndarray:
    """Size-preserving rotation by bilinear resampling about ``pivot``.

    Positive angles follow the ``np.rot90`` direction. The default pivot is
    the raster center ((H-1)/2, (W-1)/2).
    """
    img = as_float(img)
    h, w = img.shape[:2]
    cr, cc = pivot if pivot is not None else ((h - 1) / 2.0, (w - 1) / 2.0)
    theta = np.deg2rad(degrees)
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    rr, cc_grid = np.meshgrid(np.arange(h, dtype=np.float64),
                              np.arange(w, dtype=np.float64), indexing="ij")
    dr = rr - cr
    dc = cc_grid - cc
    src_c = cos_t * dc - sin_t * dr + cc
    src_r = sin_t * dc + cos_t * dr + cr
    return bilinear_sample(img, src_r, src_c, fill=fill)


def correlate1d(img: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """1-D correlation along ``axis`` with mirror (edge-repeating) padding."""
    kernel = np.asarray(kernel, dtype=np.float64)
    radius = len(kernel) // 2
    pad = [(0, 0)] * img.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(img, pad, mode="symmetric")
    windows = np.lib.stride_tricks.sliding_window_view(padded, len(kernel), axis=axis)
    return np.tensordot(windows, kernel, axes=([-1], [0]))


def correlate2d(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2-D correlation with mirror padding; RGB filtered per channel."""
    kernel = np.asarray(kernel, dtype=np.float64)
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    pad = [(rh, rh), (rw, rw)] + [(0, 0)] * (img.ndim - 2)
    padded = np.pad(img, pad, mode="symmetric")
    win = np.lib.stride_tricks.sliding_window_view(padded, (kh, kw), axis=(0, 1))
    # windows shape: (H, W[, C], kh, kw)
    return np.tensordot(win, kernel, axes=([-2, -1], [0, 1]))


def pad_to_square(img: np.ndarray, fill: float = 0.0) -> tuple[np.ndarray, tuple[int, int]]:
    """Zero-pad a 2-D raster to a centered square; returns (square, offsets)."""
    h, w = img.shape[:2]
    side = max(h, w)
    top = (side - h) // 2
    left = (side - w) // 2
    if img.ndim == 2:
        out = np.full((side, side), fill, dtype=np.float64)
        out[top : top + h, left : left + w] = img
    else:
        out = np.full((side, side, img.shape[2]), fill, dtype=np.float64)
        out[top : top + h, left : left + w, :] = img
    return out, (top, left)


def crop_from_square(square: np.ndarray, offsets: tuple[int, int], shape: tuple[int, int]) -> np.ndarray:
    top, left = offsets
    h, w = shape
    return square[top : top + h, left : left + w]

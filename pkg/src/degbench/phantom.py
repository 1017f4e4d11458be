"""Test phantoms and synthetic image corpora.

The head phantom is the standard ten-ellipse arrangement with contrast
values rescaled into [0, 1]; the disk phantom has a one-pixel anti-aliased
edge so chord-profile comparisons are not dominated by rasterization.
"""

from __future__ import annotations

import numpy as np

# (value, half-axis a, half-axis b, center x, center y, rotation deg)
_HEAD_ELLIPSES = [
    (1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0),
    (-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0),
    (-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0),
    (-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0),
    (0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0),
    (0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0),
    (0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0),
    (0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0),
]


def shepp_logan(size: int) -> np.ndarray:
    """Modified head phantom on a size x size grid, values in [0, 1]."""
    coords = (np.arange(size) - (size - 1) / 2.0) / (size / 2.0)
    x = coords[None, :]
    y = -coords[:, None]
    img = np.zeros((size, size), dtype=np.float64)
    for value, a, b, x0, y0, phi in _HEAD_ELLIPSES:
        t = np.deg2rad(phi)
        xr = (x - x0) * np.cos(t) + (y - y0) * np.sin(t)
        yr = -(x - x0) * np.sin(t) + (y - y0) * np.cos(t)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += value
    return np.clip(img, 0.0, 1.0)


def disk(
    size: int,
    radius: float,
    value: float = 1.0,
    center: tuple[float, float] | None = None,
) -> np.ndarray:
    """Filled disk with a one-pixel anti-aliased edge."""
    cy, cx = center if center is not None else ((size - 1) / 2.0, (size - 1) / 2.0)
    yy = np.arange(size, dtype=np.float64)[:, None]
    xx = np.arange(size, dtype=np.float64)[None, :]
    dist = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
    return value * np.clip(radius + 0.5 - dist, 0.0, 1.0)


def synthetic_corpus(
    n: int, size: int = 64, seed: int = 7, rgb: bool = False
) -> list[np.ndarray]:
    """Deterministic textured test images: gradients, blobs, and shapes.

    Designed to be sensitive to every operator family (noise, blur,
    geometry, intensity, reconstruction), so PSNR comparisons do not
    degenerate on flat content.
    """
    rng = np.random.default_rng(seed)
    images = []
    coords = np.linspace(0.0, 1.0, size)
    xx, yy = np.meshgrid(coords, coords)
    for _ in range(n):
        img = 0.15 + 0.3 * (rng.random() * xx + rng.random() * yy)
        # smooth blobs
        for _ in range(rng.integers(3, 7)):
            cx, cy = rng.random(2)
            s = rng.uniform(0.05, 0.25)
            amp = rng.uniform(-0.35, 0.5)
            img = img + amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))
        # a few hard-edged rectangles for high-frequency content
        for _ in range(rng.integers(1, 4)):
            r0, c0 = rng.integers(0, size // 2, size=2)
            rh, cw = rng.integers(size // 8, size // 3, size=2)
            img[r0 : r0 + rh, c0 : c0 + cw] += rng.uniform(-0.25, 0.35)
        img = np.clip(img, 0.0, 1.0)
        if rgb:
            shift = rng.uniform(-0.08, 0.08, size=3)
            img = np.clip(img[:, :, None] + shift[None, None, :], 0.0, 1.0)
        images.append(img)
    return images

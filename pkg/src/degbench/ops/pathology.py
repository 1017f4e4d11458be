"""Histopathology slide-preparation overlays: blood cells, dark spots, bubbles.

Each overlay rasterizes an anti-aliased coverage mask m and blends
out = (1 - m*opacity) * in + m*opacity * target. Pixels outside the mask are
untouched; placement is deterministic under the seed.
"""

from __future__ import annotations

import numpy as np

from .common import as_float, clamp01

BLOOD_CELL_RGB = (0.55, 0.08, 0.10)
DARK_SPOT_INTENSITY = 0.08
BUBBLE_BRIGHTEN = 0.15
BUBBLE_EDGE_INTENSITY = 0.30

ARTIFACT_KINDS = ("blood_cell", "dark_spot", "bubble")


def _disk_coverage(h: int, w: int, cy: float, cx: float, radius: float) -> np.ndarray:
    """Anti-aliased disk mask: 1 strictly inside, 0 outside, soft 1-px edge."""
    yy = np.arange(h, dtype=np.float64)[:, None]
    xx = np.arange(w, dtype=np.float64)[None, :]
    dist = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
    return np.clip(radius + 0.5 - dist, 0.0, 1.0)


def _annulus_coverage(
    h: int, w: int, cy: float, cx: float, radius: float, width: float
) -> np.ndarray:
    yy = np.arange(h, dtype=np.float64)[:, None]
    xx = np.arange(w, dtype=np.float64)[None, :]
    dist = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
    return np.clip(width / 2.0 + 0.5 - np.abs(dist - radius), 0.0, 1.0)


def _blend(img: np.ndarray, mask: np.ndarray, opacity: float, target) -> np.ndarray:
    m = mask * opacity
    if img.ndim == 3:
        m = m[:, :, None]
        target = np.broadcast_to(np.asarray(target, dtype=np.float64), img.shape)
    return (1.0 - m) * img + m * target


def overlay_artifact(
    img: np.ndarray,
    kind: str,
    count: int,
    radius_range_px: tuple[float, float],
    opacity: float,
    seed: int,
) -> np.ndarray:
    """Scatter ``count`` slide artifacts of the given kind over the image.

    blood_cell: filled red-tinted disks. dark_spot: low-intensity blobs made
    of 3-6 overlapping jittered disks. bubble: a dark coverslip ring outline
    around a semi-transparent brightened interior.
    """
    if kind not in ARTIFACT_KINDS:
        raise ValueError(f"unknown artifact kind {kind!r}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if not 0 <= opacity <= 1:
        raise ValueError(f"opacity must be in [0, 1], got {opacity}")
    r_min, r_max = float(radius_range_px[0]), float(radius_range_px[1])
    if r_min <= 0 or r_max < r_min:
        raise ValueError(f"bad radius range ({r_min}, {r_max})")
    img = as_float(img)
    h, w = img.shape[:2]
    if r_max > min(h, w) / 2:
        raise ValueError(f"max radius {r_max} exceeds image half-size {min(h, w) / 2}")
    if count == 0 or opacity == 0:
        return img.copy()

    rng = np.random.default_rng(seed)
    rgb = img.ndim == 3

    if kind == "blood_cell":
        mask = np.zeros((h, w), dtype=np.float64)
        for _ in range(count):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            r = rng.uniform(r_min, r_max)
            mask = np.maximum(mask, _disk_coverage(h, w, cy, cx, r))
        target = BLOOD_CELL_RGB if rgb else float(np.dot(BLOOD_CELL_RGB, (0.299, 0.587, 0.114)))
        return clamp01(_blend(img, mask, opacity, target))

    if kind == "dark_spot":
        mask = np.zeros((h, w), dtype=np.float64)
        for _ in range(count):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            r = rng.uniform(r_min, r_max)
            n_sub = int(rng.integers(3, 7))
            for _ in range(n_sub):
                jy = cy + rng.uniform(-0.7, 0.7) * r
                jx = cx + rng.uniform(-0.7, 0.7) * r
                sub_r = rng.uniform(0.4, 0.8) * r
                mask = np.maximum(mask, _disk_coverage(h, w, jy, jx, max(sub_r, 1.0)))
        target = (DARK_SPOT_INTENSITY,) * 3 if rgb else DARK_SPOT_INTENSITY
        return clamp01(_blend(img, mask, opacity, target))

    # bubble: brightened interior behind a dark ring outline
    out = img.copy()
    for _ in range(count):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        r = rng.uniform(r_min, r_max)
        ring_width = max(1.5, 0.12 * r)
        interior = _disk_coverage(h, w, cy, cx, max(r - ring_width, 1.0))
        ring = _annulus_coverage(h, w, cy, cx, r, ring_width)
        brightened = clamp01(out + BUBBLE_BRIGHTEN)
        m_int = interior * opacity
        m_ring = ring * opacity
        if rgb:
            m_int = m_int[:, :, None]
            m_ring = m_ring[:, :, None]
        out = (1.0 - m_int) * out + m_int * brightened
        edge = np.broadcast_to(np.float64(BUBBLE_EDGE_INTENSITY), out.shape)
        out = (1.0 - m_ring) * out + m_ring * edge
    return clamp01(out)

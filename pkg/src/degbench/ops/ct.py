"""Parallel-beam tomography simulator and the three CT degradations.

Forward projection is rotate-and-sum with bilinear sampling; reconstruction
is filtered back-projection with a Ram-Lak (ramp) filter and bilinear
interpolation. Sparse-view and limited-angle reconstruct from angular
subsets; low-dose injects Poisson photon noise into the sinogram domain.

Geometry: detector bins span the padded image diagonal (odd count); the
rotation pivot and the detector origin both sit on the embedded image
center, so forward and back projection share one coordinate frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import (
    as_float,
    bilinear_sample,
    clamp01,
    crop_from_square,
    luminance,
    pad_to_square,
)

FULL_VIEWS = 720  # default number of projections over 180 degrees

# Peak attenuation assigned to the largest line integral before the Poisson
# photon model; keeps exp(-p) in a numerically sane range.
PEAK_ATTENUATION = 4.0

MIN_VIEWS = 8


@dataclass(frozen=True)
class Sinogram:
    """Stack of line-integral projections: values[view, detector_bin]."""

    values: np.ndarray
    angles: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        angles = np.asarray(self.angles, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"sinogram values must be 2-D, got {values.shape}")
        if len(angles) != values.shape[0]:
            raise ValueError(
                f"angle count {len(angles)} != view count {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("sinogram contains non-finite values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "angles", angles)

    @property
    def views(self) -> int:
        return self.values.shape[0]

    @property
    def bins(self) -> int:
        return self.values.shape[1]


def full_angle_grid(views: int = FULL_VIEWS) -> np.ndarray:
    """Evenly spaced projection angles (radians) over [0, pi)."""
    return np.arange(views, dtype=np.float64) * np.pi / views


def detector_bins(side: int) -> int:
    """Odd detector count covering the diagonal of a ``side`` px square."""
    b = int(np.ceil(np.sqrt(2.0) * side))
    return b if b % 2 == 1 else b + 1


def _embed(img: np.ndarray) -> tuple[np.ndarray, float, int]:
    """Center a square image on the detector-sized canvas.

    Returns (canvas, pivot, offset) where ``pivot`` is the embedded image
    center in canvas coordinates (used as both rotation pivot and detector
    origin).
    """
    side = img.shape[0]
    b = detector_bins(side)
    off = (b - side) // 2
    canvas = np.zeros((b, b), dtype=np.float64)
    canvas[off : off + side, off : off + side] = img
    pivot = off + (side - 1) / 2.0
    return canvas, pivot, off


def radon_forward(img: np.ndarray, angles: np.ndarray) -> Sinogram:
    """Line integrals of ``img`` along each angle (rotate-and-sum).

    Non-square inputs are zero-padded to a centered square; RGB collapses to
    luminance. Linear in the image. Per-view sums run in a fixed order, so
    outputs are bit-identical across runs.
    """
    angles = np.asarray(angles, dtype=np.float64)
    if angles.size == 0:
        raise ValueError("angle list must be non-empty")
    img = luminance(as_float(img))
    img, _ = pad_to_square(img)
    canvas, pivot, _ = _embed(img)
    b = canvas.shape[0]

    # Two-pixel zero margin lets the gather skip bounds masks: out-of-canvas
    # samples clip into an all-zero ring, which equals a zero fill exactly.
    stride = b + 4
    padded = np.zeros((stride, stride), dtype=np.float64)
    padded[2:-2, 2:-2] = canvas
    flat = padded.ravel()

    idx = np.arange(b, dtype=np.float64)
    dr = idx[:, None] - pivot
    dc = idx[None, :] - pivot
    shift = pivot + 2.0
    values = np.empty((angles.size, b), dtype=np.float64)
    for i, theta in enumerate(angles):
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        src_c = cos_t * dc - sin_t * dr + shift
        src_r = sin_t * dc + cos_t * dr + shift
        np.clip(src_r, 0.5, b + 2.5, out=src_r)
        np.clip(src_c, 0.5, b + 2.5, out=src_c)
        r0 = src_r.astype(np.int64)
        c0 = src_c.astype(np.int64)
        fr = src_r - r0
        fc = src_c - c0
        base = r0 * stride + c0
        top = (1.0 - fc) * flat[base] + fc * flat[base + 1]
        bottom = (1.0 - fc) * flat[base + stride] + fc * flat[base + stride + 1]
        rotated = (1.0 - fr) * top + fr * bottom
        values[i] = rotated.sum(axis=0)
    return Sinogram(values=values, angles=angles)


def _ramp_filter(nfft: int) -> np.ndarray:
    """Frequency response of the band-limited ramp (Ram-Lak) filter."""
    spatial = np.zeros(nfft, dtype=np.float64)
    spatial[0] = 0.25
    odd = np.arange(1, nfft // 2 + 1, 2)
    spatial[odd] = -1.0 / (np.pi * odd) ** 2
    spatial[-odd] = -1.0 / (np.pi * odd) ** 2
    return 2.0 * np.real(np.fft.fft(spatial))


def fbp_reconstruct(sino: Sinogram, size: int, clamp: bool = True) -> np.ndarray:
    """Filtered back-projection of a sinogram onto a ``size`` px square.

    Ramp-filters each view, then accumulates bilinear reads along the
    detector coordinate in fixed view order. Clamps to [0, 1] unless
    ``clamp=False`` (the raw reconstruction is linear in the sinogram).
    """
    if sino.views == 0:
        raise ValueError("cannot reconstruct from zero views")
    b = sino.bins
    off = (b - size) // 2
    pivot = off + (size - 1) / 2.0

    nfft = 1
    while nfft < 2 * b:
        nfft *= 2
    ramp = _ramp_filter(nfft)
    spectra = np.fft.fft(sino.values, n=nfft, axis=1) * ramp[None, :]
    filtered = np.real(np.fft.ifft(spectra, axis=1))[:, :b]

    coords = np.arange(size, dtype=np.float64)
    xx = coords[None, :] - (size - 1) / 2.0
    yy = coords[:, None] - (size - 1) / 2.0
    recon = np.zeros((size, size), dtype=np.float64)
    for i in range(sino.views):
        theta = sino.angles[i]
        u = xx * np.cos(theta) + yy * np.sin(theta) + pivot
        recon += np.interp(u.ravel(), np.arange(b, dtype=np.float64),
                           filtered[i], left=0.0, right=0.0).reshape(size, size)
    recon *= np.pi / (2.0 * sino.views)
    return clamp01(recon) if clamp else recon


def _roundtrip(img: np.ndarray, angles: np.ndarray) -> np.ndarray:
    gray = luminance(as_float(img))
    h, w = gray.shape
    square, offsets = pad_to_square(gray)
    sino = radon_forward(square, angles)
    recon = fbp_reconstruct(sino, square.shape[0])
    return crop_from_square(recon, offsets, (h, w))


def sparse_view(img: np.ndarray, keep_stride: int, full_views: int = FULL_VIEWS) -> np.ndarray:
    """Reconstruct from every ``keep_stride``-th of the full view set."""
    keep_stride = int(keep_stride)
    if keep_stride < 1:
        raise ValueError(f"keep_stride must be >= 1, got {keep_stride}")
    angles = full_angle_grid(full_views)[::keep_stride]
    if angles.size < MIN_VIEWS:
        raise ValueError(
            f"stride {keep_stride} of {full_views} views retains {angles.size} < {MIN_VIEWS}"
        )
    return _roundtrip(img, angles)


def limited_angle(img: np.ndarray, kept_arc_deg: float, full_views: int = FULL_VIEWS) -> np.ndarray:
    """Reconstruct from the contiguous arc [0, kept_arc_deg) of views."""
    if not 0 < kept_arc_deg <= 180:
        raise ValueError(f"kept arc must be in (0, 180], got {kept_arc_deg}")
    n_keep = int(round(full_views * kept_arc_deg / 180.0))
    angles = full_angle_grid(full_views)[:n_keep]
    if angles.size < MIN_VIEWS:
        raise ValueError(f"arc {kept_arc_deg} deg retains {angles.size} < {MIN_VIEWS} views")
    return _roundtrip(img, angles)


def low_dose(
    img: np.ndarray, photons_i0: float, seed: int, full_views: int = FULL_VIEWS
) -> np.ndarray:
    """Poisson photon noise in the sinogram domain, then FBP.

    The sinogram is scaled so its peak maps to attenuation PEAK_ATTENUATION;
    per-bin counts ~ Poisson(I0 * exp(-p)) are floored at one photon and
    converted back to noisy line integrals.
    """
    if photons_i0 <= 0:
        raise ValueError(f"photon count must be > 0, got {photons_i0}")
    gray = luminance(as_float(img))
    h, w = gray.shape
    square, offsets = pad_to_square(gray)
    angles = full_angle_grid(full_views)
    sino = radon_forward(square, angles)

    peak = float(sino.values.max())
    scale = PEAK_ATTENUATION / peak if peak > 0 else 1.0
    p = sino.values * scale
    rng = np.random.default_rng(seed)
    counts = rng.poisson(photons_i0 * np.exp(-p)).astype(np.float64)
    counts = np.maximum(counts, 1.0)
    noisy_p = -np.log(counts / photons_i0)
    noisy = Sinogram(values=noisy_p / scale, angles=angles)

    recon = fbp_reconstruct(noisy, square.shape[0])
    return crop_from_square(recon, offsets, (h, w))

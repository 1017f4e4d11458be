"""Centered 2-D Fourier machinery and the three MRI degradations.

Undersampling drops phase-encode rows (Cartesian acquisition) while always
keeping a central auto-calibration band; ghosting scales a comb of
phase-encode lines, producing shifted replicas; the bias field multiplies
the image by a smooth exp-polynomial inhomogeneity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import as_float, clamp01, luminance


@dataclass(frozen=True)
class KSpace:
    """Complex frequency grid, same H x W as the source, DC at the center."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.complex128)
        if grid.ndim != 2:
            raise ValueError(f"k-space grid must be 2-D, got {grid.shape}")
        object.__setattr__(self, "grid", grid)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape


def kspace_forward(img: np.ndarray) -> KSpace:
    """Orthonormal 2-D FFT with the DC coefficient shifted to the center."""
    gray = luminance(as_float(img))
    return KSpace(np.fft.fftshift(np.fft.fft2(gray, norm="ortho")))


def kspace_inverse(k: KSpace) -> np.ndarray:
    """Magnitude image of the inverse transform, clamped to [0, 1]."""
    img = np.fft.ifft2(np.fft.ifftshift(k.grid), norm="ortho")
    return clamp01(np.abs(img))


def phase_encode_mask(
    n_lines: int, retain_frac: float, acs_frac: float, seed: int
) -> np.ndarray:
    """Boolean keep-mask over phase-encode lines.

    The central ceil(acs_frac * n) lines are always kept; the rest are kept
    i.i.d. with the probability that meets ``retain_frac`` overall in
    expectation.
    """
    if not 0 < retain_frac <= 1:
        raise ValueError(f"retain fraction must be in (0, 1], got {retain_frac}")
    if not 0 <= acs_frac <= 1:
        raise ValueError(f"ACS fraction must be in [0, 1], got {acs_frac}")
    n_acs = int(np.ceil(acs_frac * n_lines))
    if retain_frac * n_lines < n_acs:
        raise ValueError(
            f"retain fraction {retain_frac} keeps fewer lines than the "
            f"{n_acs}-line ACS band"
        )
    mask = np.zeros(n_lines, dtype=bool)
    start = (n_lines - n_acs) // 2
    mask[start : start + n_acs] = True
    rest = ~mask
    n_rest = int(rest.sum())
    if n_rest > 0:
        p = (retain_frac * n_lines - n_acs) / n_rest
        rng = np.random.default_rng(seed)
        draws = rng.random(n_lines)
        mask |= rest & (draws < p)
    return mask


def undersample_kspace(
    img: np.ndarray, retain_frac: float, acs_frac: float, seed: int
) -> np.ndarray:
    """Reconstruct from row-masked k-space (Cartesian undersampling)."""
    k = kspace_forward(img)
    mask = phase_encode_mask(k.shape[0], retain_frac, acs_frac, seed)
    return kspace_inverse(KSpace(k.grid * mask[:, None]))


def ghosting(
    img: np.ndarray, num_ghosts: int, intensity: float, axis: int = 0
) -> np.ndarray:
    """Scale every ``num_ghosts``-th phase-encode line by (1 - intensity).

    Produces num_ghosts - 1 shifted replicas at spacing H/num_ghosts along
    the chosen axis, each with amplitude ~ intensity / num_ghosts.
    """
    num_ghosts = int(num_ghosts)
    if num_ghosts < 2:
        raise ValueError(f"ghost count must be >= 2, got {num_ghosts}")
    if not 0 <= intensity < 1:
        raise ValueError(f"intensity must be in [0, 1), got {intensity}")
    if axis not in (0, 1):
        raise ValueError(f"axis must be 0 (rows) or 1 (cols), got {axis}")
    k = kspace_forward(img)
    n = k.shape[axis]
    idx = np.arange(n)
    comb = (idx - n // 2) % num_ghosts == 0  # comb centered on DC
    scale = np.where(comb, 1.0 - intensity, 1.0)
    grid = k.grid * (scale[:, None] if axis == 0 else scale[None, :])
    return kspace_inverse(KSpace(grid))


def bias_basis(order: int) -> list[tuple[int, int]]:
    """Exponent pairs (a, b) of the 2-D polynomial basis, total degree <= order."""
    return [(a, b) for d in range(order + 1) for a in range(d + 1) for b in (d - a,)]


def bias_field_values(
    shape: tuple[int, int], coeffs: np.ndarray, order: int = 3
) -> np.ndarray:
    """The strictly positive multiplicative field exp(sum c_j u^a v^b)."""
    terms = bias_basis(order)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape != (len(terms),):
        raise ValueError(
            f"expected {len(terms)} coefficients for order {order}, got {coeffs.shape}"
        )
    h, w = shape
    u = np.linspace(-1.0, 1.0, w)[None, :]
    v = np.linspace(-1.0, 1.0, h)[:, None]
    g = np.zeros((h, w), dtype=np.float64)
    for c, (a, b) in zip(coeffs, terms):
        g += c * (u**a) * (v**b)
    return np.exp(g)


def bias_field(img: np.ndarray, coeffs: np.ndarray, order: int = 3) -> np.ndarray:
    """Multiply by a smooth exp-polynomial inhomogeneity field, clamped."""
    img = as_float(img)
    field = bias_field_values(img.shape[:2], coeffs, order)
    if img.ndim == 3:
        field = field[:, :, None]
    return clamp01(img * field)

"""Severity calibration table and degradation dispatch.

Maps (type, severity) or a continuous strength t in [0, 1] to concrete
operator parameters, enforces modality compatibility, and routes specs to
the operator packs. L0 always returns the input image bit-identically.

Directional free parameters the table does not fix (blur angle, brightness
or gamma direction, rotation sign, translation signs, bias-field
coefficients) are drawn deterministically from the spec seed, so a spec
plus seed fully reproduces the output.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import (
    DegradationSpec,
    DegradationType,
    Image,
    IncompatibleDegradationError,
    Modality,
    Severity,
    compatible_types,
    stable_seed,
)
from .ops import ct, general, mri, pathology

__all__ = [
    "SeverityTable",
    "default_table",
    "severity_params",
    "params_at",
    "make_spec",
    "apply_degradation",
    "apply_at",
    "compatible_types",
]


@dataclass(frozen=True)
class ParamAnchor:
    """Identity/L1/L2 anchor values for one named parameter."""

    identity: float
    l1: float
    l2: float
    kind: str = "linear"  # linear | int | log

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "int", "log"):
            raise ValueError(f"unknown param kind {self.kind!r}")

    def at(self, t: float, t1: float, t2: float) -> float | int:
        """Piecewise-linear value at strength t; hits anchors exactly."""
        lo, hi, u = (
            (self.identity, self.l1, t / t1) if t < t1
            else (self.l1, self.l2, (t - t1) / (t2 - t1)) if t <= t2
            else (self.l2, self.l2, 0.0)
        )
        if self.kind == "log":
            value = 10.0 ** (math.log10(lo) * (1.0 - u) + math.log10(hi) * u)
        else:
            value = lo * (1.0 - u) + hi * u
        if self.kind == "int":
            return int(math.floor(value + 0.5))
        return value

    def exact(self, severity: Severity) -> float | int:
        value = (self.identity, self.l1, self.l2)[int(severity)]
        return int(value) if self.kind == "int" else float(value)


@dataclass(frozen=True)
class TypeEntry:
    t1: float
    t2: float
    params: Mapping[str, ParamAnchor]

    def __post_init__(self) -> None:
        if not 0.0 < self.t1 < self.t2 <= 1.0:
            raise ValueError(f"anchors must satisfy 0 < t1 < t2 <= 1, got {self.t1}, {self.t2}")


class SeverityTable:
    """Per-type parameter anchors plus the continuous interpolation map."""

    def __init__(self, entries: Mapping[DegradationType, TypeEntry]) -> None:
        missing = set(DegradationType) - set(entries)
        if missing:
            raise ValueError(f"severity table missing types: {sorted(t.key for t in missing)}")
        self._entries = dict(entries)

    def entry(self, dtype: DegradationType) -> TypeEntry:
        return self._entries[dtype]

    def severity_params(self, dtype: DegradationType, severity: Severity) -> dict:
        """Stored parameters for a discrete severity; L0 is the identity point."""
        entry = self._entries[dtype]
        return {name: anchor.exact(severity) for name, anchor in entry.params.items()}

    def params_at(self, dtype: DegradationType, t: float) -> dict:
        """Continuous interpolation; t=0 is the identity point, t1/t2 hit L1/L2."""
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"strength t must be in [0, 1], got {t}")
        entry = self._entries[dtype]
        return {name: anchor.at(t, entry.t1, entry.t2) for name, anchor in entry.params.items()}

    def anchor_t(self, dtype: DegradationType, severity: Severity) -> float:
        entry = self._entries[dtype]
        return (0.0, entry.t1, entry.t2)[int(severity)]

    @classmethod
    def load(cls, path: str | Path | None = None) -> "SeverityTable":
        """Load a table from TOML; defaults to the packaged calibration."""
        if path is None:
            path = Path(__file__).parent / "data" / "severity.toml"
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        entries: dict[DegradationType, TypeEntry] = {}
        for key, section in raw.items():
            dtype = DegradationType.from_key(key)
            params = {
                name: ParamAnchor(
                    identity=spec["identity"],
                    l1=spec["l1"],
                    l2=spec["l2"],
                    kind=spec.get("kind", "linear"),
                )
                for name, spec in section["params"].items()
            }
            entries[dtype] = TypeEntry(
                t1=float(section["t1"]), t2=float(section.get("t2", 1.0)), params=params
            )
        return cls(entries)


_DEFAULT_TABLE: SeverityTable | None = None


def default_table() -> SeverityTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = SeverityTable.load()
    return _DEFAULT_TABLE


def severity_params(dtype: DegradationType, severity: Severity,
                    table: SeverityTable | None = None) -> dict:
    return (table or default_table()).severity_params(dtype, severity)


def params_at(dtype: DegradationType, t: float, table: SeverityTable | None = None) -> dict:
    return (table or default_table()).params_at(dtype, t)


def make_spec(
    dtype: DegradationType,
    severity: Severity,
    seed: int,
    table: SeverityTable | None = None,
) -> DegradationSpec:
    """Spec with the table's default parameters for (type, severity)."""
    if severity == Severity.L0:
        return DegradationSpec.identity(seed)
    return DegradationSpec(
        type=dtype, severity=severity, params=severity_params(dtype, severity, table), seed=seed
    )


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------


def _direction_rng(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng(stable_seed(seed, tag))


def _sign(seed: int, tag: str) -> float:
    return 1.0 if _direction_rng(seed, tag).random() < 0.5 else -1.0


def _apply_gaussian_noise(img, p, seed):
    return general.gaussian_noise(img, p["sigma"], seed)


def _apply_gaussian_blur(img, p, seed):
    return general.gaussian_blur(img, p["sigma"])


def _apply_motion_blur(img, p, seed):
    angle = float(_direction_rng(seed, "angle").uniform(0.0, 180.0))
    return general.motion_blur(img, int(p["length"]), angle)


def _apply_low_resolution(img, p, seed):
    return general.low_resolution(img, int(p["factor"]))


def _apply_brightness(img, p, seed):
    return general.adjust_brightness(img, _sign(seed, "direction") * p["delta"])


def _apply_exposure(img, p, seed):
    gamma = p["gamma"]
    if _sign(seed, "direction") < 0:
        gamma = 1.0 / gamma
    return general.gamma_exposure(img, gamma)


def _apply_contrast(img, p, seed):
    return general.reduce_contrast(img, p["alpha"])


def _apply_rotation(img, p, seed):
    return general.rotate_image(img, _sign(seed, "direction") * p["degrees"])


def _apply_movement(img, p, seed):
    h, w = img.shape[:2]
    frac = p["shift_frac"]
    dx = _sign(seed, "dx") * round(frac * w)
    dy = _sign(seed, "dy") * round(frac * h)
    return general.translate_image(img, dx, dy)


def _apply_sparse_view(img, p, seed):
    return ct.sparse_view(img, int(p["keep_stride"]), int(p["full_views"]))


def _apply_limited_angle(img, p, seed):
    return ct.limited_angle(img, p["kept_arc_deg"], int(p["full_views"]))


def _apply_low_dose(img, p, seed):
    return ct.low_dose(img, p["photons"], seed, int(p["full_views"]))


def _apply_undersampling(img, p, seed):
    return mri.undersample_kspace(img, p["retain_frac"], p["acs_frac"], seed)


def _apply_ghosting(img, p, seed):
    return mri.ghosting(img, int(p["num_ghosts"]), p["intensity"])


def _apply_bias_field(img, p, seed):
    order = int(p["order"])
    n = len(mri.bias_basis(order))
    coeffs = _direction_rng(seed, "bias").uniform(-p["coeff_scale"], p["coeff_scale"], n)
    return mri.bias_field(img, coeffs, order)


def _overlay(kind):
    def apply(img, p, seed):
        return pathology.overlay_artifact(
            img, kind, int(p["count"]), (p["radius_min"], p["radius_max"]), p["opacity"], seed
        )

    return apply


_OPERATORS: dict[DegradationType, Callable] = {
    DegradationType.GAUSSIAN_NOISE: _apply_gaussian_noise,
    DegradationType.GAUSSIAN_BLUR: _apply_gaussian_blur,
    DegradationType.MOTION_BLUR: _apply_motion_blur,
    DegradationType.LOW_RESOLUTION: _apply_low_resolution,
    DegradationType.ADJUST_BRIGHTNESS: _apply_brightness,
    DegradationType.EXPOSURE: _apply_exposure,
    DegradationType.REDUCE_CONTRAST: _apply_contrast,
    DegradationType.OBJECT_ROTATION: _apply_rotation,
    DegradationType.OBJECT_MOVEMENT: _apply_movement,
    DegradationType.SPARSE_VIEW: _apply_sparse_view,
    DegradationType.LIMITED_ANGLE: _apply_limited_angle,
    DegradationType.LOW_DOSE: _apply_low_dose,
    DegradationType.UNDERSAMPLING: _apply_undersampling,
    DegradationType.GHOSTING: _apply_ghosting,
    DegradationType.BIAS_FIELD: _apply_bias_field,
    DegradationType.BLOOD_CELL: _overlay("blood_cell"),
    DegradationType.DARK_SPOTS: _overlay("dark_spot"),
    DegradationType.BUBBLE: _overlay("bubble"),
}


def apply_params(img: np.ndarray, dtype: DegradationType, params: Mapping, seed: int) -> np.ndarray:
    """Dispatch to the concrete operator without compatibility checks."""
    out = _OPERATORS[dtype](np.asarray(img, dtype=np.float64), dict(params), seed)
    if out.shape[:2] != img.shape[:2]:
        raise AssertionError(f"{dtype.key} changed raster size {img.shape} -> {out.shape}")
    return out


def apply_degradation(
    img: np.ndarray | Image,
    modality: Modality,
    spec: DegradationSpec,
    table: SeverityTable | None = None,
) -> np.ndarray | Image:
    """Apply one degradation spec; severity L0 returns the image bit-identically."""
    wrapped = isinstance(img, Image)
    pixels = img.pixels if wrapped else np.asarray(img, dtype=np.float64)
    if spec.type is not None and modality not in spec.type.modalities:
        raise IncompatibleDegradationError(
            f"{spec.type.key} cannot occur on {modality.value} "
            f"(compatible: {sorted(m.value for m in spec.type.modalities)})"
        )
    if spec.severity == Severity.L0:
        out = pixels.copy()
    else:
        params = spec.params or severity_params(spec.type, spec.severity, table)
        out = apply_params(pixels, spec.type, params, spec.seed)
    return Image(out) if wrapped else out


def apply_at(
    img: np.ndarray,
    modality: Modality,
    dtype: DegradationType,
    t: float,
    seed: int,
    table: SeverityTable | None = None,
) -> np.ndarray:
    """Continuous-strength application used by the calibration preview.

    t = 0 returns the clean image exactly; t1/t2 match the L1/L2 defaults.
    """
    if modality not in dtype.modalities:
        raise IncompatibleDegradationError(
            f"{dtype.key} cannot occur on {modality.value}"
        )
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"strength t must be in [0, 1], got {t}")
    pixels = np.asarray(img, dtype=np.float64)
    if t == 0.0:
        return pixels.copy()
    params = params_at(dtype, t, table)
    return apply_params(pixels, dtype, params, seed)

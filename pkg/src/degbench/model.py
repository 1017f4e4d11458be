"""Shared domain types for the degradation benchmark.

Images are 2-D rasters with float pixels in [0, 1], grayscale or RGB.
Degradations form a closed 18-member taxonomy grouped into five categories;
each type declares the imaging modalities it can physically occur on.
Benchmark manifests are JSONL files, one record per degraded sample; this
module owns the record schema and its validation.
"""

from __future__ import annotations

import enum
import hashlib
import json
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

MANIFEST_SCHEMA_VERSION = 1

OPTION_LETTERS = string.ascii_uppercase

MIN_IMAGE_SIDE = 8


def option_labels(k: int) -> list[str]:
    """Consecutive uppercase option labels A.. for k options."""
    if not 2 <= k <= 26:
        raise ValueError(f"option count must be in [2, 26], got {k}")
    return list(OPTION_LETTERS[:k])


def stable_seed(*parts: Any) -> int:
    """Deterministic 64-bit seed from a tuple of printable parts.

    Unlike builtin ``hash`` this is stable across processes and runs.
    """
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")


class Modality(enum.Enum):
    MRI = "MRI"
    CT = "CT"
    XRAY = "XRay"
    ULTRASOUND = "Ultrasound"
    DERMOSCOPY = "Dermoscopy"
    HISTOPATHOLOGY = "Histopathology"
    ENDOSCOPY = "Endoscopy"

    @classmethod
    def parse(cls, value: str) -> "Modality":
        for m in cls:
            if m.value == value:
                return m
        raise ValueError(f"unknown modality {value!r}")


ALL_MODALITIES = frozenset(Modality)


class Severity(enum.IntEnum):
    """Degradation degree; L0 is the clean image, L1 < L2 in strength."""

    L0 = 0
    L1 = 1
    L2 = 2

    @classmethod
    def parse(cls, value: str) -> "Severity":
        try:
            return cls[value]
        except KeyError:
            raise ValueError(f"unknown severity {value!r}") from None


class DegradationCategory(enum.Enum):
    ARTIFACTS = "Artifacts"
    MOTION = "Motion"
    INTENSITY = "Intensity"
    NOISE = "Noise"
    RESOLUTION_BLUR = "ResolutionBlur"


class DegradationType(enum.Enum):
    """The 18 degradation types with category and modality compatibility.

    Nine types are restricted to the modality where the physical mechanism
    exists (CT reconstruction, MRI k-space, slide preparation); the other
    nine apply to every modality.
    """

    # Artifacts (modality-specific)
    LIMITED_ANGLE = ("limited_angle", DegradationCategory.ARTIFACTS, (Modality.CT,))
    SPARSE_VIEW = ("sparse_view", DegradationCategory.ARTIFACTS, (Modality.CT,))
    BIAS_FIELD = ("bias_field_artifact", DegradationCategory.ARTIFACTS, (Modality.MRI,))
    UNDERSAMPLING = ("undersampling_artifact", DegradationCategory.ARTIFACTS, (Modality.MRI,))
    GHOSTING = ("ghosting_artifact", DegradationCategory.ARTIFACTS, (Modality.MRI,))
    BLOOD_CELL = ("blood_cell_artifact", DegradationCategory.ARTIFACTS, (Modality.HISTOPATHOLOGY,))
    DARK_SPOTS = ("dark_spots_artifact", DegradationCategory.ARTIFACTS, (Modality.HISTOPATHOLOGY,))
    # Motion interference (general)
    OBJECT_ROTATION = ("object_rotation", DegradationCategory.MOTION, None)
    OBJECT_MOVEMENT = ("object_movement", DegradationCategory.MOTION, None)
    # Intensity jitter (general)
    ADJUST_BRIGHTNESS = ("adjust_brightness", DegradationCategory.INTENSITY, None)
    EXPOSURE = ("exposure", DegradationCategory.INTENSITY, None)
    REDUCE_CONTRAST = ("reduce_contrast", DegradationCategory.INTENSITY, None)
    # Noise
    GAUSSIAN_NOISE = ("gaussian_noise", DegradationCategory.NOISE, None)
    LOW_DOSE = ("low_dose", DegradationCategory.NOISE, (Modality.CT,))
    # Resolution & blur
    LOW_RESOLUTION = ("low_resolution", DegradationCategory.RESOLUTION_BLUR, None)
    MOTION_BLUR = ("motion_blur", DegradationCategory.RESOLUTION_BLUR, None)
    GAUSSIAN_BLUR = ("gaussian_blur", DegradationCategory.RESOLUTION_BLUR, None)
    BUBBLE = ("bubble", DegradationCategory.RESOLUTION_BLUR, (Modality.HISTOPATHOLOGY,))

    def __init__(self, key: str, category: DegradationCategory, modalities):
        self.key = key
        self.category = category
        self.modalities = ALL_MODALITIES if modalities is None else frozenset(modalities)

    @classmethod
    def from_key(cls, key: str) -> "DegradationType":
        try:
            return _TYPE_BY_KEY[key]
        except KeyError:
            raise ValueError(f"unknown degradation type {key!r}") from None


_TYPE_BY_KEY = {t.key: t for t in DegradationType}


def compatible_types(modality: Modality) -> list[DegradationType]:
    """All degradation types that can occur on the given modality."""
    return [t for t in DegradationType if modality in t.modalities]


class ReviewStatus(enum.Enum):
    PENDING = "pending"
    RETAINED = "retained"
    DISCARDED = "discarded"


class DiscardReason(enum.Enum):
    """The five mandatory discard criteria used by expert review."""

    POOR_BASELINE = "poor_baseline"
    MODALITY_MISMATCH = "modality_mismatch"
    SEVERE_OVER_DEGRADATION = "severe_over_degradation"
    INSUFFICIENT_L2 = "insufficient_L2"
    CLINICALLY_IRRELEVANT = "clinically_irrelevant"

    @classmethod
    def parse(cls, value: str) -> "DiscardReason":
        for r in cls:
            if r.value == value:
                return r
        raise ValueError(f"unknown discard reason {value!r}")


class IncompatibleDegradationError(ValueError):
    """Degradation type applied to a modality it cannot occur on."""


@dataclass(frozen=True)
class Image:
    """Validated raster: float pixels in [0, 1], (H, W) or (H, W, 3)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim == 3 and px.shape[2] == 1:
            px = px[:, :, 0]
        if px.ndim not in (2, 3) or (px.ndim == 3 and px.shape[2] != 3):
            raise ValueError(f"image must be (H, W) or (H, W, 3), got {px.shape}")
        if px.shape[0] < MIN_IMAGE_SIDE or px.shape[1] < MIN_IMAGE_SIDE:
            raise ValueError(f"image sides must be >= {MIN_IMAGE_SIDE}, got {px.shape}")
        if not np.all(np.isfinite(px)):
            raise ValueError("image contains non-finite pixels")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("image pixels must lie in [0, 1]")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3


@dataclass(frozen=True)
class DegradationSpec:
    """One applied corruption: type, severity, concrete parameters, seed.

    The identity spec (severity L0) carries ``type=None`` and empty params;
    an L0 spec with an explicit type must sit at that type's identity point.
    """

    type: DegradationType | None
    severity: Severity
    params: Mapping[str, float]
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)
        object.__setattr__(self, "params", dict(self.params))
        if self.type is None:
            if self.severity != Severity.L0:
                raise ValueError("spec without a type must be severity L0")
            if self.params:
                raise ValueError("identity spec must carry empty params")

    @classmethod
    def identity(cls, seed: int = 0) -> "DegradationSpec":
        return cls(type=None, severity=Severity.L0, params={}, seed=seed)


@dataclass(frozen=True)
class QAPair:
    """A multiple-choice VQA item bound to one clean image."""

    pair_id: str
    image_path: str
    question: str
    options: tuple[str, ...]
    answer: str
    modality: Modality
    capability: Mapping[str, str]
    source: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "options", tuple(self.options))
        labels = option_labels(len(self.options))
        if self.answer not in labels:
            raise ValueError(
                f"pair {self.pair_id}: answer {self.answer!r} not among labels {labels}"
            )
        cap = dict(self.capability)
        missing = {"high", "mid", "fine"} - cap.keys()
        if missing:
            raise ValueError(f"pair {self.pair_id}: capability missing {sorted(missing)}")
        object.__setattr__(self, "capability", cap)

    @property
    def k(self) -> int:
        return len(self.options)

    @property
    def labels(self) -> list[str]:
        return option_labels(self.k)


@dataclass(frozen=True)
class DegradedSample:
    """A QA pair bound to a degradation spec and a rendered image."""

    sample_id: str
    pair_id: str
    spec: DegradationSpec
    image_path: str
    status: ReviewStatus = ReviewStatus.PENDING
    reason: DiscardReason | None = None

    def __post_init__(self) -> None:
        if self.status == ReviewStatus.DISCARDED and self.reason is None:
            raise ValueError(f"sample {self.sample_id}: discarded without a reason")
        if self.status != ReviewStatus.DISCARDED and self.reason is not None:
            raise ValueError(f"sample {self.sample_id}: reason on non-discarded sample")


@dataclass(frozen=True)
class EvalSet:
    """Named, filtered collection of sample ids that metrics run over."""

    name: str
    sample_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

    @classmethod
    def from_manifest(
        cls,
        records: Iterable[Mapping[str, Any]],
        name: str,
        severity: Severity | None = None,
        category: DegradationCategory | None = None,
        modality: Modality | None = None,
        capability_mid: str | None = None,
    ) -> "EvalSet":
        ids = []
        for rec in records:
            deg = rec["degradation"]
            if severity is not None and deg["severity"] != severity.name:
                continue
            if category is not None and deg.get("category") != category.value:
                continue
            if modality is not None and rec["modality"] != modality.value:
                continue
            if capability_mid is not None and rec["capability"].get("mid") != capability_mid:
                continue
            ids.append(rec["sample_id"])
        return cls(name=name, sample_ids=tuple(ids))


@dataclass(frozen=True)
class ModelEndpoint:
    """A chat-completions-compatible endpoint plus request policy."""

    name: str
    base_url: str
    credential_env: str = "MEDQ_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 3
    temperature: float = 1.0
    backoff_s: float = 0.5


# --------------------------------------------------------------------------
# Manifest records
# --------------------------------------------------------------------------

_RECORD_KEYS = {
    "sample_id",
    "pair_id",
    "image_path",
    "question",
    "options",
    "answer",
    "modality",
    "capability",
    "degradation",
    "review",
}


def sample_to_record(pair: QAPair, sample: DegradedSample) -> dict:
    """Serialize one degraded sample (with its pair) to a manifest record."""
    spec = sample.spec
    review: dict[str, Any] = {"status": sample.status.value}
    if sample.reason is not None:
        review["reason"] = sample.reason.value
    return {
        "sample_id": sample.sample_id,
        "pair_id": sample.pair_id,
        "image_path": sample.image_path,
        "question": pair.question,
        "options": list(pair.options),
        "answer": pair.answer,
        "modality": pair.modality.value,
        "capability": dict(pair.capability),
        "degradation": {
            "type": spec.type.key if spec.type is not None else None,
            "category": spec.type.category.value if spec.type is not None else None,
            "severity": spec.severity.name,
            "params": dict(spec.params),
            "seed": spec.seed,
        },
        "review": review,
    }


def record_to_pair(rec: Mapping[str, Any]) -> QAPair:
    return QAPair(
        pair_id=rec["pair_id"],
        image_path=rec["image_path"],
        question=rec["question"],
        options=tuple(rec["options"]),
        answer=rec["answer"],
        modality=Modality.parse(rec["modality"]),
        capability=rec["capability"],
        source=rec.get("source", ""),
    )


def record_to_sample(rec: Mapping[str, Any]) -> DegradedSample:
    deg = rec["degradation"]
    dtype = None if deg["type"] is None else DegradationType.from_key(deg["type"])
    spec = DegradationSpec(
        type=dtype,
        severity=Severity.parse(deg["severity"]),
        params=deg["params"],
        seed=deg["seed"],
    )
    review = rec["review"]
    status = ReviewStatus(review["status"])
    reason = DiscardReason.parse(review["reason"]) if "reason" in review else None
    return DegradedSample(
        sample_id=rec["sample_id"],
        pair_id=rec["pair_id"],
        spec=spec,
        image_path=rec["image_path"],
        status=status,
        reason=reason,
    )


def write_manifest(path: str | Path, records: Iterable[Mapping[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_manifest(path: str | Path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            if not isinstance(rec, dict):
                raise ValueError(f"{path}:{lineno}: record is not an object")
            version = rec.get("schema_version", MANIFEST_SCHEMA_VERSION)
            if version != MANIFEST_SCHEMA_VERSION:
                raise ValueError(
                    f"{path}:{lineno}: schema version {version} != {MANIFEST_SCHEMA_VERSION}"
                )
            records.append(rec)
    return records


def _validate_record(rec: Mapping[str, Any], where: str) -> list[str]:
    problems: list[str] = []
    keys = set(rec.keys()) - {"schema_version"}
    missing = _RECORD_KEYS - keys
    extra = keys - _RECORD_KEYS
    if missing:
        return [f"{where}: missing fields {sorted(missing)}"]
    if extra:
        problems.append(f"{where}: unknown fields {sorted(extra)}")

    sid = rec.get("sample_id", "?")
    where = f"{where} (sample {sid})"

    options = rec["options"]
    if not isinstance(options, list) or not all(isinstance(o, str) for o in options):
        problems.append(f"{where}: options must be a list of strings")
        return problems
    k = len(options)
    if not 2 <= k <= 26:
        problems.append(f"{where}: option count {k} outside [2, 26]")
        return problems
    if rec["answer"] not in option_labels(k):
        problems.append(
            f"{where}: answer {rec['answer']!r} not a valid label for {k} options"
        )

    try:
        modality = Modality.parse(rec["modality"])
    except ValueError as exc:
        problems.append(f"{where}: {exc}")
        modality = None

    cap = rec["capability"]
    if not isinstance(cap, Mapping) or not {"high", "mid", "fine"} <= set(cap.keys()):
        problems.append(f"{where}: capability must carry high/mid/fine")

    deg = rec["degradation"]
    if not isinstance(deg, Mapping):
        problems.append(f"{where}: degradation must be an object")
        return problems
    try:
        severity = Severity.parse(deg["severity"])
    except (KeyError, ValueError):
        problems.append(f"{where}: bad severity {deg.get('severity')!r}")
        severity = None

    tkey = deg.get("type")
    if tkey is None:
        if severity is not None and severity != Severity.L0:
            problems.append(f"{where}: null degradation type requires severity L0")
        if deg.get("params"):
            problems.append(f"{where}: identity record must carry empty params")
        if deg.get("category") is not None:
            problems.append(f"{where}: identity record must carry null category")
    else:
        try:
            dtype = DegradationType.from_key(tkey)
        except ValueError as exc:
            problems.append(f"{where}: {exc}")
            dtype = None
        if dtype is not None:
            if deg.get("category") != dtype.category.value:
                problems.append(
                    f"{where}: category {deg.get('category')!r} does not match "
                    f"type {tkey} ({dtype.category.value})"
                )
            if modality is not None and modality not in dtype.modalities:
                problems.append(
                    f"{where}: degradation {tkey} is not compatible with "
                    f"modality {modality.value}"
                )
            if severity == Severity.L0:
                problems.append(f"{where}: L0 record must carry null type")
    if not isinstance(deg.get("seed"), int):
        problems.append(f"{where}: degradation seed must be an integer")

    review = rec["review"]
    status = review.get("status") if isinstance(review, Mapping) else None
    if status not in {s.value for s in ReviewStatus}:
        problems.append(f"{where}: bad review status {status!r}")
    else:
        has_reason = "reason" in review
        if status == ReviewStatus.DISCARDED.value:
            if not has_reason:
                problems.append(f"{where}: discarded without a reason")
            else:
                try:
                    DiscardReason.parse(review["reason"])
                except ValueError as exc:
                    problems.append(f"{where}: {exc}")
        elif has_reason:
            problems.append(f"{where}: reason on non-discarded record")
    return problems


def validate_manifest(path: str | Path, image_root: str | Path | None = None) -> list[str]:
    """Check every manifest record against the domain invariants.

    Returns a list of human-readable violations, empty when the manifest is
    valid. Raises on an unreadable file or a schema-version mismatch. When
    ``image_root`` is given, referenced images must exist and meet the
    minimum raster size.
    """
    records = read_manifest(path)
    problems: list[str] = []
    seen_ids: set[str] = set()
    for idx, rec in enumerate(records):
        where = f"record {idx}"
        problems.extend(_validate_record(rec, where))
        sid = rec.get("sample_id")
        if isinstance(sid, str):
            if sid in seen_ids:
                problems.append(f"{where}: duplicate sample_id {sid!r}")
            seen_ids.add(sid)
        if image_root is not None and isinstance(rec.get("image_path"), str):
            img_path = Path(image_root) / rec["image_path"]
            if not img_path.exists():
                problems.append(f"{where} (sample {sid}): missing image {rec['image_path']}")
            else:
                try:
                    from PIL import Image as PILImage

                    with PILImage.open(img_path) as im:
                        w, h = im.size
                    if w < MIN_IMAGE_SIDE or h < MIN_IMAGE_SIDE:
                        problems.append(
                            f"{where} (sample {sid}): image {w}x{h} below minimum size"
                        )
                except Exception as exc:  # noqa: BLE001 - report, don't crash
                    problems.append(f"{where} (sample {sid}): unreadable image ({exc})")
    return problems

"""degbench: medical image degradation simulation and MLLM robustness evaluation.

Eighteen physics-grounded degradation operators at calibrated severities, a
QA-manifest pipeline with expert review, an evaluation harness for
chat-completion endpoints, and accuracy/confidence-calibration metrics.
"""

from .model import (
    DegradationCategory,
    DegradationSpec,
    DegradationType,
    DegradedSample,
    DiscardReason,
    EvalSet,
    Image,
    IncompatibleDegradationError,
    Modality,
    ModelEndpoint,
    QAPair,
    ReviewStatus,
    Severity,
    compatible_types,
    validate_manifest,
)
from .registry import apply_degradation, make_spec, params_at, severity_params

__version__ = "0.1.0"

__all__ = [
    "DegradationCategory",
    "DegradationSpec",
    "DegradationType",
    "DegradedSample",
    "DiscardReason",
    "EvalSet",
    "Image",
    "IncompatibleDegradationError",
    "Modality",
    "ModelEndpoint",
    "QAPair",
    "ReviewStatus",
    "Severity",
    "apply_degradation",
    "compatible_types",
    "make_spec",
    "params_at",
    "severity_params",
    "validate_manifest",
]

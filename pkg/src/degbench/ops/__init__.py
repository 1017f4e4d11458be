"""Degradation operator packs: general, CT, MRI, and pathology."""

from . import common, ct, general, mri, pathology

__all__ = ["common", "ct", "general", "mri", "pathology"]

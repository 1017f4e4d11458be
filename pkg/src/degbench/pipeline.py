"""Benchmark construction: dedup the QA pool, assign degradations, review.

Pool records are JSONL with the manifest schema minus degradation/review:
{pair_id, image_path, question, options[], answer, modality,
 capability:{high, mid, fine}, source?}. Building renders every sample image
into the output directory and emits a deterministic manifest plus a stats
sidecar; wall-clock metadata lives in a separate build_info sidecar so
rebuilds are byte-identical.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .model import (
    ALL_MODALITIES,
    DegradationCategory,
    DegradationSpec,
    DegradationType,
    DegradedSample,
    DiscardReason,
    QAPair,
    ReviewStatus,
    Severity,
    compatible_types,
    record_to_pair,
    sample_to_record,
    stable_seed,
    write_manifest,
)
from .rasterio import load_raster, pixel_digest, save_png
from .registry import SeverityTable, apply_degradation, default_table, severity_params

JACCARD_THRESHOLD = 0.9
DEGRADATIONS_PER_PAIR = 3

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def question_tokens(text: str) -> frozenset[str]:
    return frozenset(_TOKEN_RE.findall(text.lower()))


def token_jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class ReviewDecision:
    """One annotator verdict on a pending sample."""

    sample_id: str
    action: str  # retain | discard
    reason: DiscardReason | None
    annotator: str
    timestamp: float

    def __post_init__(self) -> None:
        if self.action not in ("retain", "discard"):
            raise ValueError(f"unknown review action {self.action!r}")
        if self.action == "discard" and self.reason is None:
            raise ValueError(f"discard of {self.sample_id} requires a reason")
        if self.action == "retain" and self.reason is not None:
            raise ValueError(f"retain of {self.sample_id} must not carry a reason")

    def to_record(self) -> dict:
        rec: dict[str, Any] = {
            "sample_id": self.sample_id,
            "action": self.action,
            "annotator": self.annotator,
            "timestamp": self.timestamp,
        }
        if self.reason is not None:
            rec["reason"] = self.reason.value
        return rec

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "ReviewDecision":
        reason = DiscardReason.parse(rec["reason"]) if "reason" in rec else None
        return cls(
            sample_id=rec["sample_id"],
            action=rec["action"],
            reason=reason,
            annotator=rec.get("annotator", ""),
            timestamp=float(rec.get("timestamp", 0.0)),
        )


def read_decisions(path: str | Path) -> list[ReviewDecision]:
    decisions = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("kind", "review") != "review":
                continue
            decisions.append(ReviewDecision.from_record(rec))
    return decisions


def dedup_pool(
    pairs: Sequence[QAPair],
    image_root: str | Path,
    jaccard_threshold: float = JACCARD_THRESHOLD,
) -> tuple[list[QAPair], list[str]]:
    """Drop later pairs whose image hash matches a kept pair AND whose
    question token-Jaccard similarity with it is >= the threshold.

    Keeps first occurrences in input order. Pairs with unreadable images are
    skipped and reported in the returned warning list.
    """
    image_root = Path(image_root)
    kept: list[QAPair] = []
    by_hash: dict[str, list[frozenset[str]]] = {}
    warnings: list[str] = []
    for pair in pairs:
        try:
            digest = pixel_digest(load_raster(image_root / pair.image_path))
        except Exception as exc:  # noqa: BLE001 - skip-with-warning contract
            warnings.append(f"pair {pair.pair_id}: unreadable image ({exc})")
            continue
        tokens = question_tokens(pair.question)
        dupes = by_hash.get(digest, [])
        if any(token_jaccard(tokens, seen) >= jaccard_threshold for seen in dupes):
            continue
        by_hash.setdefault(digest, []).append(tokens)
        kept.append(pair)
    return kept, warnings


def assign_degradations(
    pair: QAPair,
    run_seed: int,
    table: SeverityTable | None = None,
    weights: Mapping[str, float] | None = None,
) -> list[DegradedSample]:
    """Emit 7 samples per pair: one L0 plus 3 distinct types at L1 and L2.

    Types are drawn without replacement from the modality-compatible set,
    uniformly unless per-type weights are configured. Deterministic under
    ``run_seed``; per-sample operator seeds hash (pair, type, severity, run).
    """
    table = table or default_table()
    compat = compatible_types(pair.modality)
    if len(compat) < DEGRADATIONS_PER_PAIR:
        raise ValueError(
            f"pair {pair.pair_id}: only {len(compat)} compatible types for "
            f"{pair.modality.value}, need {DEGRADATIONS_PER_PAIR}"
        )
    rng = np.random.default_rng(stable_seed(run_seed, pair.pair_id, "assign"))
    p = None
    if weights:
        raw = np.array([float(weights.get(t.key, 1.0)) for t in compat])
        if raw.min() < 0 or raw.sum() <= 0:
            raise ValueError("type weights must be non-negative with a positive sum")
        p = raw / raw.sum()
    chosen_idx = rng.choice(len(compat), size=DEGRADATIONS_PER_PAIR, replace=False, p=p)
    chosen = [compat[i] for i in chosen_idx]

    samples = [
        DegradedSample(
            sample_id=f"{pair.pair_id}__L0",
            pair_id=pair.pair_id,
            spec=DegradationSpec.identity(stable_seed(pair.pair_id, "none", "L0", run_seed)),
            image_path="",
        )
    ]
    for dtype in chosen:
        for severity in (Severity.L1, Severity.L2):
            seed = stable_seed(pair.pair_id, dtype.key, severity.name, run_seed)
            samples.append(
                DegradedSample(
                    sample_id=f"{pair.pair_id}__{dtype.key}__{severity.name}",
                    pair_id=pair.pair_id,
                    spec=DegradationSpec(
                        type=dtype,
                        severity=severity,
                        params=severity_params(dtype, severity, table),
                        seed=seed,
                    ),
                    image_path="",
                )
            )
    return samples


def apply_review(
    records: Sequence[Mapping[str, Any]],
    decisions: Sequence[ReviewDecision],
) -> tuple[list[dict], dict]:
    """Fold review decisions into a manifest.

    Discarded samples are removed (any discard wins across annotators);
    retained samples are marked. Returns the surviving records plus a
    summary with the removal fraction over the initially pending samples.
    """
    by_id = {rec["sample_id"]: dict(rec) for rec in records}
    if len(by_id) != len(records):
        raise ValueError("manifest contains duplicate sample ids")
    pending_ids = {
        sid for sid, rec in by_id.items()
        if rec["review"]["status"] == ReviewStatus.PENDING.value
    }
    discarded: dict[str, DiscardReason] = {}
    retained: set[str] = set()
    for dec in decisions:
        rec = by_id.get(dec.sample_id)
        if rec is None:
            raise ValueError(f"decision references unknown sample {dec.sample_id!r}")
        if dec.sample_id not in pending_ids:
            raise ValueError(f"decision references non-pending sample {dec.sample_id!r}")
        if dec.action == "discard":
            discarded.setdefault(dec.sample_id, dec.reason)
        else:
            retained.add(dec.sample_id)

    out: list[dict] = []
    for rec in records:
        sid = rec["sample_id"]
        if sid in discarded:
            continue
        rec = dict(rec)
        if sid in retained:
            rec["review"] = {"status": ReviewStatus.RETAINED.value}
        out.append(rec)

    n_pending = len(pending_ids)
    summary = {
        "pending": n_pending,
        "decided": len(discarded) + len(retained - set(discarded)),
        "retained": len(retained - set(discarded)),
        "discarded": len(discarded),
        "removal_fraction": (len(discarded) / n_pending) if n_pending else 0.0,
        "discard_reasons": {
            reason.value: sum(1 for r in discarded.values() if r is reason)
            for reason in DiscardReason
            if any(r is reason for r in discarded.values())
        },
    }
    return out, summary


def degradation_stats(records: Sequence[Mapping[str, Any]]) -> dict:
    """Per-type and per-category counts/ratios over the degraded samples."""
    type_counts = {t.key: 0 for t in DegradationType}
    for rec in records:
        tkey = rec["degradation"]["type"]
        if tkey is not None:
            type_counts[tkey] += 1
    total = sum(type_counts.values())
    categories = []
    for cat in DegradationCategory:
        members = [t for t in DegradationType if t.category is cat]
        cat_count = sum(type_counts[t.key] for t in members)
        categories.append(
            {
                "category": cat.value,
                "count": cat_count,
                "ratio_in_total": (cat_count / total) if total else 0.0,
                "types": [
                    {
                        "name": t.key,
                        "count": type_counts[t.key],
                        "ratio_in_parent": (type_counts[t.key] / cat_count) if cat_count else 0.0,
                        "ratio_in_total": (type_counts[t.key] / total) if total else 0.0,
                        "modality": "All"
                        if t.modalities == ALL_MODALITIES
                        else "/".join(sorted(m.value for m in t.modalities)),
                    }
                    for t in members
                ],
            }
        )
    return {"degraded_samples": total, "categories": categories}


def read_pool(pool_dir: str | Path) -> list[QAPair]:
    pool_path = Path(pool_dir) / "pool.jsonl"
    pairs = []
    with open(pool_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                pairs.append(record_to_pair(json.loads(line)))
    return pairs


def build_manifest(
    pool_dir: str | Path,
    out_dir: str | Path,
    run_seed: int,
    table: SeverityTable | None = None,
    weights: Mapping[str, float] | None = None,
    jaccard_threshold: float = JACCARD_THRESHOLD,
) -> dict:
    """Build manifest.jsonl + stats.json + rendered images under ``out_dir``.

    Deterministic for fixed inputs and seed: rerunning produces byte-equal
    manifest and stats files (timestamps live in build_info.json).
    """
    pool_dir = Path(pool_dir)
    out_dir = Path(out_dir)
    table = table or default_table()
    pairs = read_pool(pool_dir)
    kept, warnings = dedup_pool(pairs, pool_dir, jaccard_threshold)

    records: list[dict] = []
    image_dir = out_dir / "images"
    image_dir.mkdir(parents=True, exist_ok=True)
    for pair in kept:
        clean = load_raster(pool_dir / pair.image_path)
        for sample in assign_degradations(pair, run_seed, table, weights):
            degraded = apply_degradation(clean, pair.modality, sample.spec, table)
            rel_path = f"images/{sample.sample_id}.png"
            save_png(out_dir / rel_path, degraded)
            sample = DegradedSample(
                sample_id=sample.sample_id,
                pair_id=sample.pair_id,
                spec=sample.spec,
                image_path=rel_path,
                status=sample.status,
            )
            records.append(sample_to_record(pair, sample))

    write_manifest(out_dir / "manifest.jsonl", records)
    stats = degradation_stats(records)
    stats.update(
        {
            "pairs_in_pool": len(pairs),
            "pairs_after_dedup": len(kept),
            "pairs_dropped": len(pairs) - len(kept) - len(warnings),
            "pairs_unreadable": len(warnings),
            "samples": len(records),
            "run_seed": run_seed,
        }
    )
    with open(out_dir / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "build_info.json", "w", encoding="utf-8") as fh:
        json.dump({"built_at": time.time(), "warnings": warnings}, fh, indent=2)
        fh.write("\n")
    return stats

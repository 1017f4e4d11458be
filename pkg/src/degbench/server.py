"""HTTP service for the radiologist calibration and review workflow.

Serves the pending-sample queue in a per-annotator randomized (but stable)
order, renders continuous-severity previews, and persists threshold labels
and retain/discard decisions to an append-only JSONL log that the dataset
pipeline consumes. Restarting the server rebuilds its index from the log,
so decisions are durable.
"""

from __future__ import annotations

import json
import os
import statistics
import threading
import time
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

import numpy as np

from .model import (
    DegradationType,
    DiscardReason,
    Modality,
    Severity,
    compatible_types,
    read_manifest,
    stable_seed,
)
from .rasterio import encode_png, load_raster
from .registry import SeverityTable, apply_at, default_table

PREVIEW_SEED = 20240501


class ReviewBody(BaseModel):
    sample_id: str
    action: str
    reason: str | None = None
    annotator: str


class ThresholdBody(BaseModel):
    type: str
    modality: str
    image: str
    t_l1: float
    t_l2: float
    annotator: str


class DecisionStore:
    """Append-only JSONL log with an in-memory index, single-writer."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self.reviews: dict[tuple[str, str], dict] = {}  # (sample_id, annotator)
        self.thresholds: list[dict] = []
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._index(json.loads(line))

    def _index(self, rec: Mapping[str, Any]) -> None:
        if rec.get("kind") == "threshold":
            self.thresholds.append(dict(rec))
        else:
            self.reviews[(rec["sample_id"], rec["annotator"])] = dict(rec)

    def append(self, rec: Mapping[str, Any]) -> None:
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._index(rec)

    def review_for(self, sample_id: str, annotator: str) -> dict | None:
        return self.reviews.get((sample_id, annotator))

    def status_for(self, sample_id: str, annotator: str) -> str:
        rec = self.review_for(sample_id, annotator)
        if rec is None:
            return "pending"
        return "discarded" if rec["action"] == "discard" else "retained"


def create_app(
    manifest_path: str | Path,
    decisions_path: str | Path,
    image_root: str | Path | None = None,
    ui_dir: str | Path | None = None,
    table: SeverityTable | None = None,
    preview_seed: int = PREVIEW_SEED,
) -> FastAPI:
    manifest_path = Path(manifest_path)
    image_root = Path(image_root) if image_root is not None else manifest_path.parent
    table = table or default_table()
    records = read_manifest(manifest_path)
    by_sample = {rec["sample_id"]: rec for rec in records}
    # the L0 record of a pair holds its clean image
    clean_path: dict[str, str] = {}
    pair_modality: dict[str, Modality] = {}
    for rec in records:
        pid = rec["pair_id"]
        pair_modality[pid] = Modality.parse(rec["modality"])
        if rec["degradation"]["severity"] == "L0":
            clean_path[pid] = rec["image_path"]

    store = DecisionStore(decisions_path)
    app = FastAPI(title="degradation review service")

    def sample_view(rec: Mapping[str, Any]) -> dict:
        deg = rec["degradation"]
        tkey = deg["type"]
        view = {
            "sample_id": rec["sample_id"],
            "pair_id": rec["pair_id"],
            "question": rec["question"],
            "options": rec["options"],
            "answer": rec["answer"],
            "modality": rec["modality"],
            "severity": deg["severity"],
            "type": tkey,
            "image_path": rec["image_path"],
            "clean_image": rec["pair_id"] in clean_path,
        }
        if tkey is not None:
            dtype = DegradationType.from_key(tkey)
            view["t_default"] = table.anchor_t(dtype, Severity.parse(deg["severity"]))
        else:
            # clean sample: preview with any compatible type; t=0 shows it as-is
            modality = Modality.parse(rec["modality"])
            dtype = sorted(compatible_types(modality), key=lambda t: t.key)[0]
            view["t_default"] = 0.0
        view["preview_type"] = dtype.key
        view["t_l1"] = table.anchor_t(dtype, Severity.L1)
        view["t_l2"] = table.anchor_t(dtype, Severity.L2)
        return view

    @app.get("/api/queue")
    def queue(
        annotator: str = Query(...),
        status: str = Query("pending"),
        page: int = Query(0, ge=0),
        page_size: int = Query(50, ge=1, le=500),
    ) -> dict:
        if status not in ("pending", "retained", "discarded"):
            raise HTTPException(400, f"unknown status filter {status!r}")
        if not annotator:
            raise HTTPException(422, "annotator must be non-empty")
        ids = [rec["sample_id"] for rec in records]
        rng = np.random.default_rng(stable_seed("queue-order", annotator))
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]
        chosen = [sid for sid in shuffled if store.status_for(sid, annotator) == status]
        start = page * page_size
        page_items = chosen[start : start + page_size]
        return {
            "total": len(chosen),
            "page": page,
            "page_size": page_size,
            "pages": (len(chosen) + page_size - 1) // page_size,
            "samples": [sample_view(by_sample[sid]) for sid in page_items],
        }

    def render_preview(pair_id: str, type_key: str, t: float) -> bytes:
        if pair_id not in clean_path:
            raise HTTPException(404, f"unknown image {pair_id!r}")
        if not 0.0 <= t <= 1.0:
            raise HTTPException(400, f"t must be in [0, 1], got {t}")
        try:
            dtype = DegradationType.from_key(type_key)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        modality = pair_modality[pair_id]
        if modality not in dtype.modalities:
            raise HTTPException(
                400, f"{type_key} is not compatible with {modality.value}"
            )
        img = load_raster(image_root / clean_path[pair_id])
        out = apply_at(img, modality, dtype, t, preview_seed, table)
        return encode_png(out)

    @app.get("/api/preview")
    def preview(image: str, type: str, t: float) -> Response:
        return Response(content=render_preview(image, type, t), media_type="image/png")

    @app.post("/api/review")
    def review(body: ReviewBody) -> dict:
        if not body.annotator:
            raise HTTPException(422, "annotator must be non-empty")
        rec = by_sample.get(body.sample_id)
        if rec is None:
            raise HTTPException(404, f"unknown sample {body.sample_id!r}")
        if body.action not in ("retain", "discard"):
            raise HTTPException(422, f"unknown action {body.action!r}")
        if body.action == "discard":
            if body.reason is None:
                raise HTTPException(422, "discard requires a reason")
            try:
                DiscardReason.parse(body.reason)
            except ValueError as exc:
                raise HTTPException(422, str(exc)) from exc
        elif body.reason is not None:
            raise HTTPException(422, "retain must not carry a reason")
        if store.review_for(body.sample_id, body.annotator) is not None:
            raise HTTPException(
                409, f"annotator {body.annotator!r} already decided {body.sample_id!r}"
            )
        decision = {
            "kind": "review",
            "sample_id": body.sample_id,
            "action": body.action,
            "annotator": body.annotator,
            "timestamp": time.time(),
        }
        if body.reason is not None:
            decision["reason"] = body.reason
        store.append(decision)
        return {"status": store.status_for(body.sample_id, body.annotator)}

    @app.post("/api/threshold")
    def threshold(body: ThresholdBody) -> dict:
        if not body.annotator:
            raise HTTPException(422, "annotator must be non-empty")
        if not 0.0 < body.t_l1 < body.t_l2 <= 1.0:
            raise HTTPException(
                422, f"thresholds must satisfy 0 < t_l1 < t_l2 <= 1, got "
                f"({body.t_l1}, {body.t_l2})"
            )
        try:
            DegradationType.from_key(body.type)
            Modality.parse(body.modality)
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        rec = {
            "kind": "threshold",
            "type": body.type,
            "modality": body.modality,
            "image": body.image,
            "t_l1": body.t_l1,
            "t_l2": body.t_l2,
            "annotator": body.annotator,
            "timestamp": time.time(),
        }
        store.append(rec)
        return {"id": len(store.thresholds) - 1}

    @app.get("/api/export/severity-table")
    def export_severity_table() -> dict:
        grouped: dict[tuple[str, str], list[dict]] = {}
        for rec in store.thresholds:
            grouped.setdefault((rec["type"], rec["modality"]), []).append(rec)
        out: dict[str, Any] = {}
        for (tkey, modality), recs in sorted(grouped.items()):
            out.setdefault(tkey, {})[modality] = {
                "t_l1": statistics.median(r["t_l1"] for r in recs),
                "t_l2": statistics.median(r["t_l2"] for r in recs),
                "labels": len(recs),
            }
        return out

    @app.get("/api/export/decisions")
    def export_decisions() -> Response:
        lines = [
            json.dumps(rec, ensure_ascii=False)
            for rec in store.reviews.values()
        ]
        return Response(
            content="\n".join(lines) + ("\n" if lines else ""),
            media_type="application/jsonl",
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app

"""Aggregation of trial results into report tables.

Cells are keyed by model plus any of: severity, degradation category,
modality, mid-level capability. The severity table per model carries L0, L1,
L2 columns, the drop columns L1-L0 and L2-L0, and the combined L1&L2 column
whose drop is (mean of L1 and L2) - L0; printed values round to two
decimals, matching the published table convention.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .harness import TrialRecord
from .metrics import RunMetrics, SampleMetrics, run_metrics, sample_metrics
from .model import EvalSet

AXES = ("severity", "capability_mid", "degradation_category", "modality", "model")


@dataclass(frozen=True)
class ReportCell:
    axis: str
    key: str
    model: str
    acc: float | None
    mean_confidence: float | None
    delta_calib: float | None
    n: int


def severity_drops(l0: float, l1: float, l2: float) -> dict[str, float]:
    """Drop columns from per-severity accuracies (any consistent unit)."""
    combined = (l1 + l2) / 2.0
    return {
        "l1_minus_l0": l1 - l0,
        "l2_minus_l0": l2 - l0,
        "l1l2_mean": combined,
        "l1l2_drop": combined - l0,
    }


def _axis_key(axis: str, rec: Mapping[str, Any]) -> str:
    deg = rec["degradation"]
    if axis == "severity":
        return deg["severity"]
    if axis == "degradation_category":
        return deg["category"] if deg["category"] is not None else "none"
    if axis == "modality":
        return rec["modality"]
    if axis == "capability_mid":
        return rec["capability"].get("mid", "unknown")
    raise ValueError(f"unknown axis {axis!r}")


def compute_sample_metrics(
    results: Sequence[TrialRecord], manifest: Sequence[Mapping[str, Any]]
) -> list[tuple[TrialRecord, SampleMetrics, Mapping[str, Any]]]:
    by_id = {rec["sample_id"]: rec for rec in manifest}
    out = []
    for record in results:
        rec = by_id.get(record.sample_id)
        if rec is None:
            raise ValueError(f"result references unknown sample {record.sample_id!r}")
        sm = sample_metrics(
            record.sample_id, record.labels, len(rec["options"]), rec["answer"]
        )
        out.append((record, sm, rec))
    return out


def metrics_for_set(
    results: Sequence[TrialRecord],
    manifest: Sequence[Mapping[str, Any]],
    eval_set: EvalSet,
    mode: str = "per_trial",
) -> RunMetrics:
    """Run metrics restricted to one named evaluation set."""
    ids = set(eval_set.sample_ids)
    if not ids:
        raise ValueError(f"evaluation set {eval_set.name!r} is empty")
    chosen = [r for r in results if r.sample_id in ids]
    triples = compute_sample_metrics(chosen, manifest)
    return run_metrics([sm for _, sm, _ in triples], name=eval_set.name, mode=mode)


def aggregate_report(
    results: Sequence[TrialRecord],
    manifest: Sequence[Mapping[str, Any]],
    axes: Sequence[str],
    mode: str = "per_trial",
) -> dict:
    """Per-axis cells of Acc, mean confidence, calibration shift, and N.

    Results from several models may be mixed; every axis is reported per
    model. The severity axis additionally carries drop columns and the
    combined L1&L2 summary.
    """
    unknown = set(axes) - set(AXES)
    if unknown:
        raise ValueError(f"unknown axes {sorted(unknown)}; valid: {AXES}")
    triples = compute_sample_metrics(results, manifest)
    models = sorted({record.model for record, _, _ in triples})

    report: dict[str, Any] = {"models": models, "axes": {}}
    global_cells: dict[str, RunMetrics] = {}
    for model in models:
        chosen = [sm for record, sm, _ in triples if record.model == model]
        global_cells[model] = run_metrics(chosen, name=model, mode=mode)
    report["overall"] = {
        model: _cell_dict(rm) for model, rm in global_cells.items()
    }

    for axis in axes:
        if axis == "model":
            continue
        keys = sorted({_axis_key(axis, rec) for _, _, rec in triples})
        if axis == "severity":
            keys = [k for k in ("L0", "L1", "L2") if k in keys]
        cells = []
        for model in models:
            for key in keys:
                members = [
                    sm
                    for record, sm, rec in triples
                    if record.model == model and _axis_key(axis, rec) == key
                ]
                if members:
                    rm = run_metrics(members, name=f"{model}/{key}", mode=mode)
                    cells.append(
                        ReportCell(axis, key, model, rm.acc, rm.mean_confidence,
                                   rm.delta_calib, rm.n)
                    )
                else:
                    cells.append(ReportCell(axis, key, model, None, None, None, 0))
        entry: dict[str, Any] = {
            "keys": keys,
            "cells": [
                {
                    "model": c.model,
                    "key": c.key,
                    "acc": c.acc,
                    "mean_confidence": c.mean_confidence,
                    "delta_calib": c.delta_calib,
                    "n": c.n,
                }
                for c in cells
            ],
        }
        if axis == "severity":
            entry["per_model"] = _severity_summary(cells, models)
        report["axes"][axis] = entry
    return report


def _cell_dict(rm: RunMetrics) -> dict:
    return {
        "acc": rm.acc,
        "mean_confidence": rm.mean_confidence,
        "delta_calib": rm.delta_calib,
        "n": rm.n,
    }


def _severity_summary(cells: Sequence[ReportCell], models: Sequence[str]) -> dict:
    summary = {}
    for model in models:
        accs = {c.key: c.acc for c in cells if c.model == model and c.acc is not None}
        row: dict[str, Any] = {level: accs.get(level) for level in ("L0", "L1", "L2")}
        if all(accs.get(level) is not None for level in ("L0", "L1", "L2")):
            row.update(severity_drops(accs["L0"], accs["L1"], accs["L2"]))
        summary[model] = row
    return summary


def format_report(report: Mapping[str, Any], fmt: str = "md") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _format_csv(report)
    if fmt == "md":
        return _format_md(report)
    raise ValueError(f"unknown format {fmt!r}")


def _pct(value: float | None) -> str:
    """Accuracy-like fraction as a two-decimal percent, the table convention."""
    return "-" if value is None else f"{value * 100:.2f}"


def _pct_signed(value: float) -> str:
    return f"{value * 100:+.2f}"


def _format_md(report: Mapping[str, Any]) -> str:
    lines: list[str] = []
    lines.append("## Overall")
    lines.append("")
    lines.append("| Model | Acc | Mean C | Delta_calib | N |")
    lines.append("|---|---|---|---|---|")
    for model in report["models"]:
        cell = report["overall"][model]
        lines.append(
            f"| {model} | {_pct(cell['acc'])} | {_pct(cell['mean_confidence'])} "
            f"| {_pct(cell['delta_calib'])} | {cell['n']} |"
        )
    for axis, entry in report["axes"].items():
        lines.append("")
        lines.append(f"## By {axis}")
        lines.append("")
        header = "| Model | " + " | ".join(entry["keys"]) + " |"
        lines.append(header)
        lines.append("|" + "---|" * (len(entry["keys"]) + 1))
        for model in report["models"]:
            row = [model]
            for key in entry["keys"]:
                cell = next(
                    c for c in entry["cells"] if c["model"] == model and c["key"] == key
                )
                row.append(_pct(cell["acc"]))
            lines.append("| " + " | ".join(row) + " |")
        if axis == "severity" and "per_model" in entry:
            lines.append("")
            lines.append("| Model | L0 | L1 | L2 | L1-L0 | L2-L0 | L1&L2 | Drop |")
            lines.append("|---|---|---|---|---|---|---|---|")
            for model in report["models"]:
                row = entry["per_model"][model]
                cols = [
                    _pct(row.get("L0")),
                    _pct(row.get("L1")),
                    _pct(row.get("L2")),
                ]
                if "l1_minus_l0" in row:
                    cols += [
                        _pct_signed(row["l1_minus_l0"]),
                        _pct_signed(row["l2_minus_l0"]),
                        _pct(row["l1l2_mean"]),
                        _pct_signed(row["l1l2_drop"]),
                    ]
                else:
                    cols += ["-", "-", "-", "-"]
                lines.append(f"| {model} | " + " | ".join(cols) + " |")
    return "\n".join(lines) + "\n"


def _format_csv(report: Mapping[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["axis", "model", "key", "acc", "mean_confidence", "delta_calib", "n"])
    for model in report["models"]:
        cell = report["overall"][model]
        writer.writerow(
            ["overall", model, "", cell["acc"], cell["mean_confidence"],
             cell["delta_calib"], cell["n"]]
        )
    for axis, entry in report["axes"].items():
        for cell in entry["cells"]:
            writer.writerow(
                [axis, cell["model"], cell["key"], cell["acc"],
                 cell["mean_confidence"], cell["delta_calib"], cell["n"]]
            )
    return buf.getvalue()

"""Shared fixtures: toy pairs, manifest records, and on-disk pools."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from degbench.model import (
    DegradationSpec,
    DegradationType,
    DegradedSample,
    Modality,
    QAPair,
    Severity,
    sample_to_record,
)
from degbench.rasterio import save_png

CAPABILITY = {"high": "Medical Perception", "mid": "Imaging Perception", "fine": "Counting"}


def make_pair(
    pair_id: str = "p0",
    modality: Modality = Modality.XRAY,
    k: int = 4,
    answer: str = "B",
    question: str | None = None,
    image_path: str = "img.png",
    capability: dict | None = None,
) -> QAPair:
    return QAPair(
        pair_id=pair_id,
        image_path=image_path,
        question=question or f"Question for {pair_id}?",
        options=tuple(f"option {i}" for i in range(k)),
        answer=answer,
        modality=modality,
        capability=capability or dict(CAPABILITY),
        source="toy",
    )


def make_record(
    sample_id: str,
    pair_id: str | None = None,
    severity: str = "L0",
    type_key: str | None = None,
    modality: Modality = Modality.XRAY,
    image_path: str = "img.png",
    answer: str = "B",
    k: int = 4,
    question: str | None = None,
    capability: dict | None = None,
    seed: int = 1,
) -> dict:
    pair_id = pair_id or sample_id.split("__")[0]
    pair = make_pair(
        pair_id,
        modality=modality,
        k=k,
        answer=answer,
        question=question,
        image_path=image_path,
        capability=capability,
    )
    if type_key is None:
        spec = DegradationSpec.identity(seed)
    else:
        from degbench.registry import severity_params

        dtype = DegradationType.from_key(type_key)
        sev = Severity.parse(severity)
        spec = DegradationSpec(
            type=dtype, severity=sev, params=severity_params(dtype, sev), seed=seed
        )
    sample = DegradedSample(
        sample_id=sample_id, pair_id=pair_id, spec=spec, image_path=image_path
    )
    return sample_to_record(pair, sample)


def toy_image(size: int = 32, seed: int = 0, rgb: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    base = rng.random((size, size, 3) if rgb else (size, size))
    return np.round(base * 255) / 255.0  # 8-bit exact so PNG round-trips


def write_pool(
    pool_dir: Path,
    n_pairs: int = 4,
    modalities: tuple[Modality, ...] = (Modality.XRAY,),
    size: int = 32,
    k: int = 4,
) -> list[QAPair]:
    """Materialize a toy pool directory: pool.jsonl plus PNG images."""
    pool_dir.mkdir(parents=True, exist_ok=True)
    pairs = []
    with open(pool_dir / "pool.jsonl", "w", encoding="utf-8") as fh:
        for i in range(n_pairs):
            modality = modalities[i % len(modalities)]
            rel = f"img_{i}.png"
            save_png(pool_dir / rel, toy_image(size=size, seed=100 + i))
            pair = make_pair(
                pair_id=f"p{i}",
                modality=modality,
                k=k,
                answer="B",
                question=f"Toy question number {i}, what is shown?",
                image_path=rel,
            )
            pairs.append(pair)
            fh.write(
                json.dumps(
                    {
                        "pair_id": pair.pair_id,
                        "image_path": pair.image_path,
                        "question": pair.question,
                        "options": list(pair.options),
                        "answer": pair.answer,
                        "modality": pair.modality.value,
                        "capability": dict(pair.capability),
                        "source": pair.source,
                    }
                )
                + "\n"
            )
    return pairs


@pytest.fixture()
def pool_dir(tmp_path: Path) -> Path:
    write_pool(tmp_path / "pool")
    return tmp_path / "pool"

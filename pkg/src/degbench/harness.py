"""Evaluation harness: prompt rendering, answer extraction, trial collection.

Drives a chat-completions-compatible endpoint over a manifest, running T
independent trials per sample at temperature 1.0 with the image attached as
a base64 data URL. Results append to a JSONL file, one record per sample,
and completed samples are skipped on restart.
"""

from __future__ import annotations

import base64
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import httpx

from .model import ModelEndpoint, QAPair, ReviewStatus, option_labels, read_manifest, record_to_pair

PROMPT_TEMPLATE = (
    "You are a medical AI assistant. Please answer the following question "
    "based on the provided medical image. {question}\n"
    "\n"
    "{option_text}\n"
    "\n"
    "Constraint: Output ONLY the single letter (A, B, C, or D, E, etc) "
    "corresponding to the correct answer. No explanation, no punctuation.\n"
    "\n"
    "Answer:"
)

CHAT_COMPLETIONS_PATH = "/v1/chat/completions"


class AuthenticationError(RuntimeError):
    """Endpoint rejected our credentials; the whole run aborts."""


def render_prompt(pair: QAPair) -> str:
    """Instantiate the evaluation prompt for one QA pair, byte-exactly."""
    option_text = "\n".join(
        f"{label}. {text}" for label, text in zip(pair.labels, pair.options)
    )
    return PROMPT_TEMPLATE.format(question=pair.question, option_text=option_text)


def extract_answer(text: str, k: int) -> str | None:
    """Map a raw model response to an option label, or None.

    Priority: (1) the trimmed response is exactly one letter of the option
    set (case-insensitive); (2) otherwise the first capital letter in the
    text that is a valid option label; (3) otherwise None, which downstream
    scoring treats as incorrect. Capitals outside the option alphabet (the
    'T' of "The") are skipped, not matched.
    """
    labels = set(option_labels(k))
    trimmed = text.strip()
    if len(trimmed) == 1 and trimmed.upper() in labels:
        return trimmed.upper()
    for ch in text:
        if ch in labels:
            return ch
    return None


@dataclass(frozen=True)
class Trial:
    response: str
    label: str | None
    latency_ms: float


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of T independent trials on one sample."""

    sample_id: str
    model: str
    temperature: float
    trials: tuple[Trial, ...]

    def to_record(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "model": self.model,
            "temperature": self.temperature,
            "trials": [
                {"response": t.response, "label": t.label, "latency_ms": t.latency_ms}
                for t in self.trials
            ],
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "TrialRecord":
        return cls(
            sample_id=rec["sample_id"],
            model=rec["model"],
            temperature=rec["temperature"],
            trials=tuple(
                Trial(t["response"], t["label"], t.get("latency_ms", 0.0))
                for t in rec["trials"]
            ),
        )

    @property
    def labels(self) -> list[str | None]:
        return [t.label for t in self.trials]


def read_results(path: str | Path) -> list[TrialRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(TrialRecord.from_record(json.loads(line)))
    return records


def _build_payload(endpoint: ModelEndpoint, prompt: str, image_png: bytes) -> dict:
    data_url = "data:image/png;base64," + base64.b64encode(image_png).decode("ascii")
    return {
        "model": endpoint.name,
        "temperature": endpoint.temperature,
        "messages": [
            {
                "role": "user",
                "content": [
                    {"type": "text", "text": prompt},
                    {"type": "image_url", "image_url": {"url": data_url}},
                ],
            }
        ],
    }


def _headers(endpoint: ModelEndpoint) -> dict:
    token = os.environ.get(endpoint.credential_env, "")
    return {"Authorization": f"Bearer {token}"} if token else {}


def _one_trial(
    client: httpx.Client, endpoint: ModelEndpoint, payload: dict
) -> Trial:
    start = time.monotonic()
    for attempt in range(endpoint.max_retries + 1):
        try:
            resp = client.post(
                endpoint.base_url.rstrip("/") + CHAT_COMPLETIONS_PATH,
                json=payload,
                headers=_headers(endpoint),
                timeout=endpoint.timeout_s,
            )
            if resp.status_code in (401, 403):
                raise AuthenticationError(
                    f"endpoint rejected credentials (HTTP {resp.status_code})"
                )
            if resp.status_code != 200:
                raise ValueError(f"HTTP {resp.status_code}")
            body = resp.json()
            text = body["choices"][0]["message"]["content"]
            if not isinstance(text, str):
                raise ValueError("malformed reply")
            latency = (time.monotonic() - start) * 1000.0
            return Trial(response=text, label=None, latency_ms=latency)
        except AuthenticationError:
            raise
        except (httpx.HTTPError, ValueError, KeyError, IndexError):
            if attempt < endpoint.max_retries:
                time.sleep(endpoint.backoff_s * (2.0**attempt))
    latency = (time.monotonic() - start) * 1000.0
    return Trial(response="", label=None, latency_ms=latency)


def run_trials(
    endpoint: ModelEndpoint,
    pair: QAPair,
    sample_id: str,
    image_png: bytes,
    trials: int,
    client: httpx.Client | None = None,
) -> TrialRecord:
    """Run T independent chat requests for one sample (fresh context each)."""
    prompt = render_prompt(pair)
    payload = _build_payload(endpoint, prompt, image_png)
    own_client = client is None
    client = client or httpx.Client()
    try:
        outcomes = []
        for _ in range(trials):
            trial = _one_trial(client, endpoint, payload)
            label = extract_answer(trial.response, pair.k) if trial.response else None
            outcomes.append(Trial(trial.response, label, trial.latency_ms))
    finally:
        if own_client:
            client.close()
    return TrialRecord(
        sample_id=sample_id,
        model=endpoint.name,
        temperature=endpoint.temperature,
        trials=tuple(outcomes),
    )


def completed_sample_ids(out_path: str | Path) -> set[str]:
    done: set[str] = set()
    path = Path(out_path)
    if path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    done.add(json.loads(line)["sample_id"])
    return done


def run_benchmark(
    manifest_path: str | Path,
    endpoint: ModelEndpoint,
    trials: int,
    parallelism: int,
    out_path: str | Path,
    image_root: str | Path | None = None,
) -> int:
    """Evaluate every retained sample; resume-safe and append-only.

    Samples already present in ``out_path`` are skipped. At most
    ``parallelism`` samples are in flight; each sample's trials run
    sequentially. Returns the number of newly evaluated samples.
    """
    manifest_path = Path(manifest_path)
    image_root = Path(image_root) if image_root is not None else manifest_path.parent
    records = read_manifest(manifest_path)
    eligible = [
        rec for rec in records
        if rec["review"]["status"] != ReviewStatus.DISCARDED.value
    ]
    done = completed_sample_ids(out_path)
    todo = [rec for rec in eligible if rec["sample_id"] not in done]

    def evaluate(rec: Mapping[str, Any]) -> TrialRecord:
        pair = record_to_pair(rec)
        image_png = (image_root / rec["image_path"]).read_bytes()
        with httpx.Client() as client:
            return run_trials(
                endpoint, pair, rec["sample_id"], image_png, trials, client=client
            )

    written = 0
    with open(out_path, "a", encoding="utf-8") as out:
        with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
            futures = [pool.submit(evaluate, rec) for rec in todo]
            try:
                for future in as_completed(futures):
                    record = future.result()
                    out.write(json.dumps(record.to_record(), ensure_ascii=False) + "\n")
                    out.flush()
                    written += 1
            except AuthenticationError:
                for f in futures:
                    f.cancel()
                raise
    return written

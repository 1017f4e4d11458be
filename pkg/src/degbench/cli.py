"""Command-line entry points for the degradation benchmark."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .model import (
    DegradationType,
    Modality,
    ModelEndpoint,
    Severity,
    read_manifest,
    validate_manifest,
)
from .rasterio import load_raster, save_png


@click.group()
def main() -> None:
    """Medical image degradation benchmark tools."""


@main.command()
@click.option("--type", "type_key", required=True, help="degradation type key")
@click.option("--severity", "severity_name", default="L2", show_default=True,
              type=click.Choice(["L0", "L1", "L2"]))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--modality", "modality_name", default=None,
              help="imaging modality; defaults to the first compatible one")
@click.option("--t", "strength", default=None, type=float,
              help="continuous strength in [0, 1] instead of a severity level")
@click.option("--table", "table_path", default=None, type=click.Path(exists=True),
              help="custom severity table TOML")
@click.argument("input_path", type=click.Path(exists=True))
@click.argument("output_path", type=click.Path())
def degrade(type_key, severity_name, seed, modality_name, strength, table_path,
            input_path, output_path) -> None:
    """Apply one degradation to an image file."""
    from .registry import SeverityTable, apply_at, apply_degradation, make_spec

    dtype = DegradationType.from_key(type_key)
    modality = (
        Modality.parse(modality_name)
        if modality_name
        else sorted(dtype.modalities, key=lambda m: m.value)[0]
    )
    table = SeverityTable.load(table_path) if table_path else None
    img = load_raster(input_path)
    if strength is not None:
        out = apply_at(img, modality, dtype, strength, seed, table)
    else:
        spec = make_spec(dtype, Severity.parse(severity_name), seed, table)
        out = apply_degradation(img, modality, spec, table)
    save_png(output_path, out)
    click.echo(f"wrote {output_path}")


@main.command()
@click.argument("kind", type=click.Choice(["shepp-logan", "disk"]))
@click.option("--size", default=256, show_default=True, type=int)
@click.option("--radius", default=80.0, show_default=True, type=float,
              help="disk radius in pixels (disk phantom only)")
@click.option("--out", "out_path", required=True, type=click.Path())
def phantom(kind, size, radius, out_path) -> None:
    """Generate a test phantom image."""
    from . import phantom as ph

    img = ph.shepp_logan(size) if kind == "shepp-logan" else ph.disk(size, radius)
    save_png(out_path, img)
    click.echo(f"wrote {out_path}")


@main.command("build-manifest")
@click.option("--pool", "pool_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", "run_seed", default=0, show_default=True, type=int)
@click.option("--table", "table_path", default=None, type=click.Path(exists=True))
def build_manifest_cmd(pool_dir, out_dir, run_seed, table_path) -> None:
    """Dedup the pool, assign degradations, render images, write the manifest."""
    from .pipeline import build_manifest
    from .registry import SeverityTable

    table = SeverityTable.load(table_path) if table_path else None
    stats = build_manifest(pool_dir, out_dir, run_seed, table)
    click.echo(json.dumps({k: stats[k] for k in
                           ("pairs_in_pool", "pairs_after_dedup", "samples")}, indent=2))


@main.command("apply-review")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--decisions", "decisions_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def apply_review_cmd(manifest_path, decisions_path, out_path) -> None:
    """Fold review decisions into a manifest; discarded samples are removed."""
    from .model import write_manifest
    from .pipeline import apply_review, read_decisions

    records = read_manifest(manifest_path)
    decisions = read_decisions(decisions_path)
    surviving, summary = apply_review(records, decisions)
    write_manifest(out_path, surviving)
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--image-root", default=None, type=click.Path(exists=True))
def validate(manifest_path, image_root) -> None:
    """Validate a manifest; exits non-zero when violations are found."""
    problems = validate_manifest(manifest_path, image_root)
    for p in problems:
        click.echo(p)
    if problems:
        sys.exit(1)
    click.echo("manifest OK")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--endpoint", "base_url", required=True, help="endpoint base URL")
@click.option("--model", "model_name", required=True)
@click.option("--trials", default=3, show_default=True, type=int)
@click.option("--parallel", default=4, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--image-root", default=None, type=click.Path(exists=True))
@click.option("--timeout", default=60.0, show_default=True, type=float)
@click.option("--max-retries", default=3, show_default=True, type=int)
@click.option("--temperature", default=1.0, show_default=True, type=float)
def evaluate(manifest_path, base_url, model_name, trials, parallel, out_path,
             image_root, timeout, max_retries, temperature) -> None:
    """Run T trials per retained sample against a chat-completions endpoint."""
    from .harness import run_benchmark

    endpoint = ModelEndpoint(
        name=model_name,
        base_url=base_url,
        timeout_s=timeout,
        max_retries=max_retries,
        temperature=temperature,
    )
    n = run_benchmark(manifest_path, endpoint, trials, parallel, out_path, image_root)
    click.echo(f"evaluated {n} samples -> {out_path}")


@main.command()
@click.option("--results", "results_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--axes", default="severity", show_default=True,
              help="comma-separated: severity,capability_mid,degradation_category,modality")
@click.option("--format", "fmt", default="md", show_default=True,
              type=click.Choice(["md", "csv", "json"]))
@click.option("--mode", default="per_trial", show_default=True,
              type=click.Choice(["per_trial", "majority"]))
@click.option("--out", "out_path", default=None, type=click.Path())
def report(results_path, manifest_path, axes, fmt, mode, out_path) -> None:
    """Aggregate results into report tables."""
    from .harness import read_results
    from .report import aggregate_report, format_report

    results = read_results(results_path)
    manifest = read_manifest(manifest_path)
    rep = aggregate_report(results, manifest, axes.split(","), mode=mode)
    text = format_report(rep, fmt)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--decisions", "decisions_path", required=True, type=click.Path())
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--image-root", default=None, type=click.Path(exists=True))
@click.option("--ui", "ui_dir", default=None, type=click.Path(exists=True),
              help="directory with the built review UI bundle")
def serve(manifest_path, decisions_path, port, host, image_root, ui_dir) -> None:
    """Start the calibration/review HTTP service."""
    import uvicorn

    from .server import create_app

    app = create_app(manifest_path, decisions_path, image_root, ui_dir)
    uvicorn.run(app, host=host, port=port)


@main.command("mock-endpoint")
@click.option("--port", default=8099, show_default=True, type=int)
@click.option("--mode", default="random", show_default=True,
              type=click.Choice(["random", "correct", "fixed"]))
@click.option("--manifest", "manifest_path", default=None, type=click.Path(exists=True),
              help="required for --mode correct (builds the answer key)")
@click.option("--label", default="A", show_default=True, help="label for --mode fixed")
@click.option("--seed", default=0, show_default=True, type=int)
def mock_endpoint(port, mode, manifest_path, label, seed) -> None:
    """Serve a local mock chat-completions endpoint (for demos and tests)."""
    import time as _time

    from . import mockend

    if mode == "correct":
        if not manifest_path:
            raise click.UsageError("--mode correct requires --manifest")
        key = {rec["question"]: rec["answer"] for rec in read_manifest(manifest_path)}
        behavior = mockend.correct_from_key(key)
    elif mode == "fixed":
        behavior = mockend.always(label)
    else:
        behavior = mockend.uniform_random(seed)

    server = mockend.MockChatEndpoint(behavior, port=port)
    server.start()
    click.echo(f"mock endpoint at {server.url} (Ctrl-C to stop)")
    try:
        while True:
            _time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()

"""Dedup, degradation assignment, review folding, manifest building."""

from __future__ import annotations

import json

import numpy as np
import pytest

from degbench.model import (
    DegradationType,
    DiscardReason,
    Modality,
    Severity,
    read_manifest,
    validate_manifest,
)
from degbench.pipeline import (
    ReviewDecision,
    apply_review,
    assign_degradations,
    build_manifest,
    dedup_pool,
    degradation_stats,
    question_tokens,
    token_jaccard,
)
from degbench.rasterio import save_png

from conftest import make_pair, make_record, toy_image, write_pool


class TestDedup:
    def _pool(self, tmp_path, specs):
        """specs: list of (pair_id, image_seed, question)."""
        root = tmp_path / "pool"
        root.mkdir()
        pairs = []
        for pid, img_seed, question in specs:
            rel = f"{pid}.png"
            save_png(root / rel, toy_image(seed=img_seed))
            pairs.append(make_pair(pid, question=question, image_path=rel))
        return root, pairs

    def test_identical_image_and_question_second_dropped(self, tmp_path):
        root, pairs = self._pool(
            tmp_path,
            [("a", 1, "What organ is shown?"), ("b", 1, "What organ is shown?")],
        )
        kept, warnings = dedup_pool(pairs, root)
        assert [p.pair_id for p in kept] == ["a"]
        assert warnings == []

    def test_identical_image_disjoint_questions_both_kept(self, tmp_path):
        root, pairs = self._pool(
            tmp_path,
            [("a", 1, "What organ is shown?"), ("b", 1, "Count the visible lesions")],
        )
        kept, _ = dedup_pool(pairs, root)
        assert [p.pair_id for p in kept] == ["a", "b"]

    def test_one_token_of_ten_below_threshold_both_kept(self, tmp_path):
        # Jaccard = 9/11 ~ 0.818 < 0.9
        q1 = "one two three four five six seven eight nine ten"
        q2 = "one two three four five six seven eight nine eleven"
        assert token_jaccard(question_tokens(q1), question_tokens(q2)) == pytest.approx(9 / 11)
        root, pairs = self._pool(tmp_path, [("a", 1, q1), ("b", 1, q2)])
        kept, _ = dedup_pool(pairs, root)
        assert len(kept) == 2

    def test_near_identical_question_dropped(self, tmp_path):
        q1 = "one two three four five six seven eight nine ten"
        root, pairs = self._pool(tmp_path, [("a", 1, q1), ("b", 1, q1 + " ")])
        kept, _ = dedup_pool(pairs, root)
        assert len(kept) == 1

    def test_different_images_same_question_both_kept(self, tmp_path):
        root, pairs = self._pool(
            tmp_path, [("a", 1, "Same question?"), ("b", 2, "Same question?")]
        )
        kept, _ = dedup_pool(pairs, root)
        assert len(kept) == 2

    def test_unreadable_image_skipped_with_warning(self, tmp_path):
        root = tmp_path / "pool"
        root.mkdir()
        save_png(root / "ok.png", toy_image(seed=1))
        (root / "broken.png").write_text("not a png")
        pairs = [
            make_pair("a", image_path="ok.png"),
            make_pair("b", image_path="broken.png"),
        ]
        kept, warnings = dedup_pool(pairs, root)
        assert [p.pair_id for p in kept] == ["a"]
        assert len(warnings) == 1 and "b" in warnings[0]


class TestAssignDegradations:
    def test_emits_exactly_seven_samples(self):
        pair = make_pair("p1", modality=Modality.CT)
        samples = assign_degradations(pair, run_seed=42)
        assert len(samples) == 7
        l0 = [s for s in samples if s.spec.severity == Severity.L0]
        assert len(l0) == 1 and l0[0].spec.type is None
        degraded = [s for s in samples if s.spec.severity != Severity.L0]
        types = {s.spec.type for s in degraded}
        assert len(types) == 3
        by_type = {t: sorted(s.spec.severity for s in degraded if s.spec.type is t)
                   for t in types}
        assert all(v == [Severity.L1, Severity.L2] for v in by_type.values())

    def test_types_modality_compatible(self):
        for modality in Modality:
            pair = make_pair("p2", modality=modality)
            for s in assign_degradations(pair, run_seed=7):
                if s.spec.type is not None:
                    assert modality in s.spec.type.modalities

    def test_deterministic_under_run_seed(self):
        pair = make_pair("p3", modality=Modality.MRI)
        a = assign_degradations(pair, run_seed=5)
        b = assign_degradations(pair, run_seed=5)
        assert [(s.sample_id, s.spec) for s in a] == [(s.sample_id, s.spec) for s in b]

    def test_different_run_seeds_change_assignment(self):
        pair = make_pair("p4", modality=Modality.HISTOPATHOLOGY)
        picks = {
            tuple(sorted(s.spec.type.key for s in assign_degradations(pair, seed)
                         if s.spec.type))
            for seed in range(12)
        }
        assert len(picks) > 1

    def test_weights_steer_sampling(self):
        pair = make_pair("p5", modality=Modality.XRAY)
        weights = {"gaussian_noise": 1.0, "gaussian_blur": 1.0, "motion_blur": 1.0}
        # zero weight for everything else
        for t in DegradationType:
            weights.setdefault(t.key, 0.0)
        samples = assign_degradations(pair, run_seed=3, weights=weights)
        chosen = {s.spec.type.key for s in samples if s.spec.type}
        assert chosen == {"gaussian_noise", "gaussian_blur", "motion_blur"}

    def test_per_sample_seeds_differ_by_severity(self):
        pair = make_pair("p6", modality=Modality.CT)
        samples = assign_degradations(pair, run_seed=11)
        seeds = [s.spec.seed for s in samples]
        assert len(set(seeds)) == len(seeds)


class TestApplyReview:
    def _manifest(self, n):
        return [make_record(f"p{i}__L0", image_path=f"img_{i}.png") for i in range(n)]

    def test_removal_fraction_eight_percent(self):
        records = self._manifest(100)
        decisions = [
            ReviewDecision(f"p{i}__L0", "discard",
                           DiscardReason.SEVERE_OVER_DEGRADATION, "r1", 0.0)
            for i in range(8)
        ] + [
            ReviewDecision(f"p{i}__L0", "retain", None, "r1", 0.0)
            for i in range(8, 100)
        ]
        remaining, summary = apply_review(records, decisions)
        assert summary["removal_fraction"] == pytest.approx(0.08)
        assert summary["discarded"] == 8
        assert len(remaining) == 92

    def test_retained_sample_marked_and_present(self):
        records = self._manifest(2)
        decisions = [ReviewDecision("p0__L0", "retain", None, "r1", 0.0)]
        remaining, _ = apply_review(records, decisions)
        by_id = {r["sample_id"]: r for r in remaining}
        assert by_id["p0__L0"]["review"]["status"] == "retained"
        assert by_id["p1__L0"]["review"]["status"] == "pending"

    def test_unknown_sample_rejected(self):
        with pytest.raises(ValueError, match="unknown sample"):
            apply_review(self._manifest(1),
                         [ReviewDecision("ghost", "retain", None, "r1", 0.0)])

    def test_discard_without_reason_rejected_at_construction(self):
        with pytest.raises(ValueError, match="requires a reason"):
            ReviewDecision("p0__L0", "discard", None, "r1", 0.0)

    def test_reason_outside_enum_rejected(self):
        with pytest.raises(ValueError, match="unknown discard reason"):
            ReviewDecision.from_record(
                {"sample_id": "s", "action": "discard", "reason": "blurry_vibes",
                 "annotator": "r1"}
            )

    def test_any_discard_wins_across_annotators(self):
        records = self._manifest(1)
        decisions = [
            ReviewDecision("p0__L0", "retain", None, "r1", 0.0),
            ReviewDecision("p0__L0", "discard", DiscardReason.POOR_BASELINE, "r2", 1.0),
        ]
        remaining, summary = apply_review(records, decisions)
        assert remaining == [] and summary["discarded"] == 1


class TestBuildManifest:
    def test_four_pairs_give_28_records(self, tmp_path):
        write_pool(tmp_path / "pool", n_pairs=4)
        stats = build_manifest(tmp_path / "pool", tmp_path / "out", run_seed=1)
        records = read_manifest(tmp_path / "out" / "manifest.jsonl")
        assert len(records) == 28
        assert stats["samples"] == 28

    def test_manifest_validates_clean(self, tmp_path):
        write_pool(tmp_path / "pool", n_pairs=2,
                   modalities=(Modality.XRAY, Modality.HISTOPATHOLOGY))
        build_manifest(tmp_path / "pool", tmp_path / "out", run_seed=2)
        problems = validate_manifest(tmp_path / "out" / "manifest.jsonl",
                                     image_root=tmp_path / "out")
        assert problems == []

    def test_stats_category_ratios_sum_to_one(self, tmp_path):
        write_pool(tmp_path / "pool", n_pairs=3)
        stats = build_manifest(tmp_path / "pool", tmp_path / "out", run_seed=3)
        total = sum(c["ratio_in_total"] for c in stats["categories"])
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_toy_category_ratio(self):
        records = [
            make_record("a__ghosting_artifact__L1", severity="L1",
                        type_key="ghosting_artifact", modality=Modality.MRI),
            make_record("b__gaussian_noise__L1", severity="L1", type_key="gaussian_noise"),
            make_record("c__gaussian_blur__L1", severity="L1", type_key="gaussian_blur"),
            make_record("d__motion_blur__L1", severity="L1", type_key="motion_blur"),
        ]
        stats = degradation_stats(records)
        by_cat = {c["category"]: c for c in stats["categories"]}
        assert by_cat["Artifacts"]["ratio_in_total"] == pytest.approx(0.25)

    def test_rebuild_is_byte_identical(self, tmp_path):
        write_pool(tmp_path / "pool", n_pairs=2)
        build_manifest(tmp_path / "pool", tmp_path / "out1", run_seed=9)
        build_manifest(tmp_path / "pool", tmp_path / "out2", run_seed=9)
        m1 = (tmp_path / "out1" / "manifest.jsonl").read_bytes()
        m2 = (tmp_path / "out2" / "manifest.jsonl").read_bytes()
        assert m1 == m2
        s1 = (tmp_path / "out1" / "stats.json").read_bytes()
        s2 = (tmp_path / "out2" / "stats.json").read_bytes()
        assert s1 == s2
        img = "images/p0__L0.png"
        assert (tmp_path / "out1" / img).read_bytes() == (tmp_path / "out2" / img).read_bytes()

    def test_l0_render_is_lossless_copy_of_clean(self, tmp_path):
        write_pool(tmp_path / "pool", n_pairs=1)
        build_manifest(tmp_path / "pool", tmp_path / "out", run_seed=4)
        from degbench.rasterio import load_raster

        clean = load_raster(tmp_path / "pool" / "img_0.png")
        rendered = load_raster(tmp_path / "out" / "images" / "p0__L0.png")
        assert np.array_equal(clean, rendered)

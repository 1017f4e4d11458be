"""Domain type invariants and manifest validation."""

from __future__ import annotations

import json

import numpy as np
import pytest

from degbench.model import (
    ALL_MODALITIES,
    DegradationCategory,
    DegradationSpec,
    DegradationType,
    DegradedSample,
    DiscardReason,
    Image,
    Modality,
    QAPair,
    ReviewStatus,
    Severity,
    compatible_types,
    option_labels,
    read_manifest,
    record_to_pair,
    record_to_sample,
    sample_to_record,
    stable_seed,
    validate_manifest,
    write_manifest,
)

from conftest import make_record


class TestTaxonomy:
    def test_exactly_18_types(self):
        assert len(DegradationType) == 18

    def test_exactly_7_modalities(self):
        assert len(Modality) == 7

    def test_five_categories_cover_all_types(self):
        by_cat = {c: [t for t in DegradationType if t.category is c]
                  for c in DegradationCategory}
        assert sum(len(v) for v in by_cat.values()) == 18
        assert len(by_cat[DegradationCategory.ARTIFACTS]) == 7
        assert len(by_cat[DegradationCategory.MOTION]) == 2
        assert len(by_cat[DegradationCategory.INTENSITY]) == 3
        assert len(by_cat[DegradationCategory.NOISE]) == 2
        assert len(by_cat[DegradationCategory.RESOLUTION_BLUR]) == 4

    def test_modality_restrictions_match_published_table(self):
        ct_only = {"limited_angle", "sparse_view", "low_dose"}
        mri_only = {"bias_field_artifact", "undersampling_artifact", "ghosting_artifact"}
        path_only = {"blood_cell_artifact", "dark_spots_artifact", "bubble"}
        for t in DegradationType:
            if t.key in ct_only:
                assert t.modalities == frozenset({Modality.CT})
            elif t.key in mri_only:
                assert t.modalities == frozenset({Modality.MRI})
            elif t.key in path_only:
                assert t.modalities == frozenset({Modality.HISTOPATHOLOGY})
            else:
                assert t.modalities == ALL_MODALITIES, t.key

    def test_compatible_types_ct(self):
        keys = {t.key for t in compatible_types(Modality.CT)}
        assert {"limited_angle", "sparse_view", "low_dose"} <= keys
        assert len(keys) == 12  # 9 general + 3 CT-specific

    def test_compatible_types_histopathology(self):
        keys = {t.key for t in compatible_types(Modality.HISTOPATHOLOGY)}
        assert {"blood_cell_artifact", "dark_spots_artifact", "bubble"} <= keys
        assert len(keys) == 12

    def test_gaussian_noise_compatible_everywhere(self):
        for modality in Modality:
            assert DegradationType.GAUSSIAN_NOISE in compatible_types(modality)

    def test_severity_total_order(self):
        assert Severity.L0 < Severity.L1 < Severity.L2

    def test_discard_reasons_are_the_five_criteria(self):
        assert {r.value for r in DiscardReason} == {
            "poor_baseline",
            "modality_mismatch",
            "severe_over_degradation",
            "insufficient_L2",
            "clinically_irrelevant",
        }


class TestImage:
    def test_valid_gray(self):
        img = Image(np.zeros((8, 8)))
        assert img.channels == 1 and img.width == 8

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            Image(np.zeros((4, 16)))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Image(np.full((8, 8), 1.5))

    def test_rejects_nan(self):
        bad = np.zeros((8, 8))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            Image(bad)

    def test_rejects_two_channels(self):
        with pytest.raises(ValueError):
            Image(np.zeros((8, 8, 2)))


class TestSpecAndSample:
    def test_identity_spec(self):
        spec = DegradationSpec.identity(42)
        assert spec.type is None and spec.severity == Severity.L0

    def test_identity_spec_rejects_params(self):
        with pytest.raises(ValueError):
            DegradationSpec(type=None, severity=Severity.L0, params={"sigma": 1}, seed=0)

    def test_typeless_spec_requires_l0(self):
        with pytest.raises(ValueError):
            DegradationSpec(type=None, severity=Severity.L1, params={}, seed=0)

    def test_seed_masked_to_64_bits(self):
        spec = DegradationSpec.identity(2**70 + 5)
        assert spec.seed == (2**70 + 5) % 2**64

    def test_discard_requires_reason(self):
        spec = DegradationSpec.identity(0)
        with pytest.raises(ValueError):
            DegradedSample("s", "p", spec, "x.png", status=ReviewStatus.DISCARDED)

    def test_pair_rejects_bad_answer(self):
        with pytest.raises(ValueError):
            QAPair(
                pair_id="p",
                image_path="x.png",
                question="?",
                options=("a", "b"),
                answer="C",
                modality=Modality.CT,
                capability={"high": "h", "mid": "m", "fine": "f"},
            )

    def test_option_labels(self):
        assert option_labels(4) == ["A", "B", "C", "D"]
        with pytest.raises(ValueError):
            option_labels(1)
        with pytest.raises(ValueError):
            option_labels(27)


class TestStableSeed:
    def test_deterministic(self):
        assert stable_seed("a", 1, "L1") == stable_seed("a", 1, "L1")

    def test_distinct_parts_distinct_seeds(self):
        assert stable_seed("a", "b") != stable_seed("ab", "")

    def test_64_bit_range(self):
        s = stable_seed("anything")
        assert 0 <= s < 2**64


class TestManifestValidation:
    def test_well_formed_manifest_no_violations(self, tmp_path):
        records = [make_record(f"p{i}__L0", image_path=f"img_{i}.png") for i in range(3)]
        path = tmp_path / "m.jsonl"
        write_manifest(path, records)
        assert validate_manifest(path) == []

    def test_answer_outside_options_flagged(self, tmp_path):
        rec = make_record("p0__L0")
        rec["answer"] = "E"
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec])
        problems = validate_manifest(path)
        assert len(problems) == 1 and "p0__L0" in problems[0] and "'E'" in problems[0]

    def test_modality_incompatibility_flagged(self, tmp_path):
        rec = make_record(
            "p0__low_dose__L1",
            severity="L1",
            type_key="low_dose",
            modality=Modality.CT,
        )
        rec["modality"] = "Dermoscopy"
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec])
        problems = validate_manifest(path)
        assert len(problems) == 1
        assert "low_dose" in problems[0] and "Dermoscopy" in problems[0]

    def test_discarded_without_reason_flagged(self, tmp_path):
        rec = make_record("p0__L0")
        rec["review"] = {"status": "discarded"}
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec])
        assert any("without a reason" in p for p in validate_manifest(path))

    def test_bad_reason_flagged(self, tmp_path):
        rec = make_record("p0__L0")
        rec["review"] = {"status": "discarded", "reason": "too_ugly"}
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec])
        assert any("too_ugly" in p for p in validate_manifest(path))

    def test_schema_version_mismatch_raises(self, tmp_path):
        rec = make_record("p0__L0")
        rec["schema_version"] = 99
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec])
        with pytest.raises(ValueError, match="schema version"):
            validate_manifest(path)

    def test_unreadable_file_raises(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text("{not json}\n")
        with pytest.raises(ValueError):
            validate_manifest(path)

    def test_duplicate_sample_ids_flagged(self, tmp_path):
        rec = make_record("p0__L0")
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec, rec])
        assert any("duplicate" in p for p in validate_manifest(path))

    def test_l0_with_type_flagged(self, tmp_path):
        rec = make_record("p0__gaussian_noise__L1", severity="L1",
                          type_key="gaussian_noise")
        rec["degradation"]["severity"] = "L0"
        path = tmp_path / "m.jsonl"
        write_manifest(path, [rec])
        assert any("L0" in p for p in validate_manifest(path))


class TestRoundTrip:
    def test_serialize_parse_reproduces_records(self, tmp_path):
        records = [
            make_record("p0__L0"),
            make_record("p1__gaussian_noise__L2", severity="L2",
                        type_key="gaussian_noise", modality=Modality.MRI),
        ]
        path = tmp_path / "m.jsonl"
        write_manifest(path, records)
        loaded = read_manifest(path)
        assert loaded == records

    def test_parse_to_objects_and_back(self):
        rec = make_record("p1__sparse_view__L1", severity="L1",
                          type_key="sparse_view", modality=Modality.CT)
        pair = record_to_pair(rec)
        sample = record_to_sample(rec)
        assert sample_to_record(pair, sample) == rec

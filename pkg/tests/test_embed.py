"""Embedding-bundle format, alignment and feature-assembly tests."""

import json

import numpy as np
import pytest

from probeforge import embed, taskgen
from probeforge.embed import (
    BundleError, BundleRecord, EmbeddingBundle, align, assemble_features,
    make_mock_bundle, read_bundle, write_bundle, MAX_SUBTOKENS, SPECIAL,
)
from probeforge.taskgen import ProbingExample, Variant


def _tiny_bundle(d=4):
    records = [
        BundleRecord("s1", "orig", 3, ((-1, -1), (0, 3), (3, 7))),
        BundleRecord("s2", "orig", 2, ((0, 2), (4, 6))),
    ]
    rng = np.random.default_rng(0)
    layers = [rng.standard_normal((5, d)).astype(np.float32)
              for _ in range(2)]
    return EmbeddingBundle("tiny", 2, d, records, layers=layers)


class TestRoundtrip:
    def test_bit_exact(self, tmp_path):
        b = _tiny_bundle()
        write_bundle(b, tmp_path / "b")
        b2 = read_bundle(tmp_path / "b")
        assert b2.model_name == "tiny"
        assert b2.records == b.records
        for layer in range(2):
            np.testing.assert_array_equal(np.asarray(b2.layer(layer)),
                                          b.layer(layer))

    def test_record_rows_slice(self):
        b = _tiny_bundle()
        np.testing.assert_array_equal(b.rows("s2", "orig", 1),
                                      b.layer(1)[3:5])

    def test_missing_record_raises(self):
        with pytest.raises(BundleError):
            _tiny_bundle().record("nope", "orig")


class TestValidation:
    def _write_valid(self, tmp_path):
        write_bundle(_tiny_bundle(), tmp_path / "b")
        return tmp_path / "b"

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(BundleError, match="manifest"):
            read_bundle(tmp_path)

    def test_bad_dtype(self, tmp_path):
        p = self._write_valid(tmp_path)
        man = json.loads((p / "manifest.json").read_text())
        man["dtype"] = "f64le"
        (p / "manifest.json").write_text(json.dumps(man))
        with pytest.raises(BundleError, match="dtype"):
            read_bundle(p)

    def test_truncated_layer_names_culprit(self, tmp_path):
        p = self._write_valid(tmp_path)
        data = (p / "layer_01.bin").read_bytes()
        (p / "layer_01.bin").write_bytes(data[:-20])
        with pytest.raises(BundleError, match="s2"):
            read_bundle(p)

    def test_non_finite_rejected(self, tmp_path):
        p = self._write_valid(tmp_path)
        mat = np.fromfile(p / "layer_00.bin", dtype="<f4")
        mat[3] = np.nan
        mat.tofile(p / "layer_00.bin")
        with pytest.raises(BundleError, match="finite"):
            read_bundle(p)

    def test_overlapping_offsets_rejected(self, tmp_path):
        p = self._write_valid(tmp_path)
        man = json.loads((p / "manifest.json").read_text())
        man["records"][1]["offsets"] = [[0, 4], [2, 6]]
        (p / "manifest.json").write_text(json.dumps(man))
        with pytest.raises(BundleError, match="overlap"):
            read_bundle(p)

    def test_crop_limit_enforced(self, tmp_path):
        p = self._write_valid(tmp_path)
        man = json.loads((p / "manifest.json").read_text())
        man["records"][0]["m"] = MAX_SUBTOKENS + 1
        (p / "manifest.json").write_text(json.dumps(man))
        with pytest.raises(BundleError):
            read_bundle(p)


class TestAlign:
    OFFSETS = ((-1, -1), (0, 4), (4, 8), (10, 14))

    def test_exact_span(self):
        assert align((4, 8), self.OFFSETS) == [2]

    def test_partial_overlap_counts(self):
        assert align((2, 6), self.OFFSETS) == [1, 2]
        assert align((7, 11), self.OFFSETS) == [2, 3]

    def test_specials_never_align(self):
        assert align((0, 100), self.OFFSETS) == [1, 2, 3]

    def test_gap_fails(self):
        assert align((8, 10), self.OFFSETS) == []

    def test_zero_width_boundary(self):
        assert align((4, 4), self.OFFSETS) == []


class TestAssemble:
    def _example(self, mode, spans, label=1):
        return ProbingExample("t", "s1", "orig", tuple(spans), mode, label)

    def test_per_subtoken_fans_out(self):
        b = _tiny_bundle()
        rows = assemble_features(
            self._example(taskgen.PER_SUBTOKEN, [(0, 7)]), b, 0,
            variant_text="abc defg")
        assert len(rows) == 2  # both non-special subtokens overlap
        assert rows[0].key == "abc"
        assert rows[1].key == " def"
        np.testing.assert_array_equal(rows[0].vector, b.layer(0)[1])

    def test_pair_concat_uses_first_subtokens(self):
        b = _tiny_bundle()
        rows = assemble_features(
            self._example(taskgen.PAIR_CONCAT, [(0, 3), (3, 7)]), b, 1,
            variant_text="abc defg")
        (row,) = rows
        assert row.vector.shape == (8,)
        np.testing.assert_array_equal(row.vector[:4], b.layer(1)[1])
        np.testing.assert_array_equal(row.vector[4:], b.layer(1)[2])
        assert row.key == "abc\x00 def"

    def test_occurrence_mean(self):
        b = _tiny_bundle()
        (row,) = assemble_features(
            self._example(taskgen.OCCURRENCE_MEAN, [(0, 3), (3, 7)]), b, 0)
        np.testing.assert_allclose(
            row.vector, b.layer(0)[1:3].mean(axis=0), rtol=1e-6)

    def test_snippet_mean_skips_specials(self):
        b = _tiny_bundle()
        (row,) = assemble_features(
            self._example(taskgen.SNIPPET_MEAN, []), b, 0)
        np.testing.assert_allclose(
            row.vector, b.layer(0)[1:3].mean(axis=0), rtol=1e-6)

    def test_cropped_span_drops_example(self):
        b = _tiny_bundle()
        rows = assemble_features(
            self._example(taskgen.PER_SUBTOKEN, [(100, 104)]), b, 0)
        assert rows == []

    def test_without_variant_text_keys_are_none(self):
        b = _tiny_bundle()
        rows = assemble_features(
            self._example(taskgen.PER_SUBTOKEN, [(0, 3)]), b, 0)
        assert rows[0].key is None


class TestMockBundle:
    VARIANTS = [Variant("s1", "orig", "int x = 1 ;"),
                Variant("s2", "orig", "int yy = 22 ;")]

    def test_deterministic(self):
        a = make_mock_bundle(self.VARIANTS, 8, 2, seed=5)
        b = make_mock_bundle(self.VARIANTS, 8, 2, seed=5)
        for layer in range(a.num_layers):
            np.testing.assert_array_equal(a.layer(layer), b.layer(layer))

    def test_seed_sensitivity(self):
        a = make_mock_bundle(self.VARIANTS, 8, 2, seed=5)
        b = make_mock_bundle(self.VARIANTS, 8, 2, seed=6)
        assert not np.array_equal(a.layer(0), b.layer(0))

    def test_order_independent_per_record(self):
        a = make_mock_bundle(self.VARIANTS, 8, 2, seed=5)
        b = make_mock_bundle(list(reversed(self.VARIANTS)), 8, 2, seed=5)
        np.testing.assert_array_equal(a.rows("s1", "orig", 1),
                                      b.rows("s1", "orig", 1))

    def test_layer_count_and_leading_special(self):
        b = make_mock_bundle(self.VARIANTS, 8, 3, seed=0)
        assert b.num_layers == 4  # embedding output + 3 blocks
        rec = b.record("s1", "orig")
        assert rec.offsets[0] == SPECIAL
        # non-special offsets cover non-space bytes of the text
        text = self.VARIANTS[0].text
        covered = "".join(text[s:e] for s, e in rec.offsets[1:])
        assert covered == text.replace(" ", "")

    def test_passes_read_validation(self, tmp_path):
        write_bundle(make_mock_bundle(self.VARIANTS, 8, 2, seed=0),
                     tmp_path / "m")
        read_bundle(tmp_path / "m")

    def test_full_alignment_on_generated_data(self, corpus):
        datasets, variants = taskgen.generate_all(corpus)
        bundle = make_mock_bundle(variants, 8, 1, seed=1)
        for task, examples in datasets.items():
            for e in examples:
                rows = assemble_features(e, bundle, 0)
                assert rows, f"{task} example failed to align"

import os
import struct

import numpy as np
import pytest

from depth_io import (DepthSequence, SampleId, SplitRule, read_sequence, read_sequence_header, write_sequence,
                      parse_sample_id, format_sample_id, build_manifest, split, read_label_mapping, write_manifest,
                      read_manifest, TruncatedDepthFileError, DepthFileSizeMismatchError, EmptyDepthSequenceError,
                      InvalidDepthSequenceError, SampleIdParseError, DuplicateSampleIdError, LabelMappingGapError,
                      LabelMappingFormatError, EmptyDatasetError, ManifestError, DepthFileError)
from depth_io.synthetic_actions import generate_synthetic_dataset, SyntheticActions


def _sequence(rng, frame_count=3, height=4, width=5):
    return DepthSequence(rng.integers(0, 5000, size=(frame_count, height, width)))


def _write_sample(root, action, subject, example, rng=None):
    rng = np.random.default_rng(0) if rng is None else rng
    path = os.path.join(root, format_sample_id(SampleId(action, subject, example)))
    write_sequence(_sequence(rng), path)
    return path


class TestDepthFiles(object):
    def test_round_trip_is_byte_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        seq = _sequence(rng, frame_count=4, height=6, width=7)
        path = str(tmp_path / "a001_s001_e001_depth.bin")

        write_sequence(seq, path)
        with open(path, "rb") as f:
            original_bytes = f.read()
        read_back = read_sequence(path)
        write_sequence(read_back, str(tmp_path / "copy.bin"))
        with open(tmp_path / "copy.bin", "rb") as f:
            copied_bytes = f.read()

        assert read_back == seq
        assert copied_bytes == original_bytes
        assert len(original_bytes) == 12 + 4 * 6 * 7 * 4

    def test_layout_is_little_endian_header_then_frames(self, tmp_path):
        frames = np.arange(6, dtype=np.uint32).reshape((1, 2, 3))
        path = str(tmp_path / "seq.bin")
        write_sequence(DepthSequence(frames), path)

        with open(path, "rb") as f:
            data = f.read()
        assert struct.unpack("<III", data[:12]) == (1, 3, 2)
        assert list(struct.unpack("<6I", data[12:])) == [0, 1, 2, 3, 4, 5]

    def test_header(self, tmp_path):
        path = str(tmp_path / "seq.bin")
        write_sequence(DepthSequence(np.ones((2, 3, 4), dtype=np.uint32)), path)
        assert read_sequence_header(path) == (2, 4, 3, 12 + 2 * 3 * 4 * 4)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "seq.bin"
        path.write_bytes(b"\x01\x00\x00")
        with pytest.raises(TruncatedDepthFileError):
            read_sequence(str(path))

    def test_truncated_frames(self, tmp_path):
        path = tmp_path / "seq.bin"
        path.write_bytes(struct.pack("<III", 2, 2, 2) + b"\x00" * 20)
        with pytest.raises(TruncatedDepthFileError):
            read_sequence(str(path))

    def test_trailing_bytes(self, tmp_path):
        path = tmp_path / "seq.bin"
        path.write_bytes(struct.pack("<III", 1, 1, 1) + b"\x00" * 8)
        with pytest.raises(DepthFileSizeMismatchError):
            read_sequence(str(path))

    def test_zero_frames(self, tmp_path):
        path = tmp_path / "seq.bin"
        path.write_bytes(struct.pack("<III", 0, 2, 2))
        with pytest.raises(EmptyDepthSequenceError):
            read_sequence(str(path))

    def test_empty_frame_list_rejected_before_write(self, tmp_path):
        path = tmp_path / "seq.bin"
        with pytest.raises(InvalidDepthSequenceError):
            write_sequence(np.zeros((0, 2, 2)), str(path))
        assert not path.exists()

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        with pytest.raises(DepthFileError):
            write_sequence(DepthSequence(np.ones((1, 2, 2))), str(blocker / "seq.bin"))

    def test_negative_depths_rejected(self):
        with pytest.raises(InvalidDepthSequenceError):
            DepthSequence(np.full((1, 2, 2), -1))


class TestSampleIds(object):
    def test_parse(self):
        assert parse_sample_id("a012_s005_e002_depth.bin") == SampleId(12, 5, 2)
        assert parse_sample_id("/data/msr/a012_s005_e002_depth.bin") == SampleId(12, 5, 2)

    def test_round_trip(self):
        for sample_id in [SampleId(1, 1, 1), SampleId(20, 10, 3), SampleId(999, 999, 999)]:
            assert parse_sample_id(format_sample_id(sample_id)) == sample_id

    @pytest.mark.parametrize("file_name, segment", [
        ("a12_s005_e002_depth.bin", "a12"),
        ("a012_x005_e002_depth.bin", "x005"),
        ("a012_s005_e0002_depth.bin", "e0002"),
        ("a000_s005_e002_depth.bin", "a000"),
        ("a012_s005_e002_extra_depth.bin", "extra"),
    ])
    def test_malformed_names_name_the_segment(self, file_name, segment):
        with pytest.raises(SampleIdParseError) as e:
            parse_sample_id(file_name)
        assert e.value.segment == segment
        assert segment in str(e.value)

    def test_wrong_suffix(self):
        with pytest.raises(SampleIdParseError):
            parse_sample_id("a012_s005_e002.bin")


class TestManifest(object):
    def test_build_is_sorted_and_complete(self, tmp_path):
        for action, subject in [(2, 1), (1, 2), (1, 1), (2, 2)]:
            _write_sample(str(tmp_path), action, subject, 1)
        (tmp_path / "notes.txt").write_text("ignored")

        manifest = build_manifest(str(tmp_path))

        assert [e.sample_id for e in manifest] == \
            [SampleId(1, 1, 1), SampleId(1, 2, 1), SampleId(2, 1, 1), SampleId(2, 2, 1)]
        assert manifest.class_count == 2
        assert {e.source_tag for e in manifest} == {"."}
        assert [e.label for e in manifest] == [1, 1, 2, 2]

    def test_empty_directory(self, tmp_path):
        with pytest.raises(EmptyDatasetError):
            build_manifest(str(tmp_path))

    def test_identity_mapping_requires_contiguous_actions(self, tmp_path):
        _write_sample(str(tmp_path), 1, 1, 1)
        _write_sample(str(tmp_path), 3, 1, 1)
        with pytest.raises(ManifestError):
            build_manifest(str(tmp_path))

    def test_source_trees_may_share_sample_ids(self, tmp_path):
        _write_sample(str(tmp_path / "msr"), 1, 1, 1)
        _write_sample(str(tmp_path / "utd"), 1, 1, 1)
        mapping_path = tmp_path / "mapping.txt"
        mapping_path.write_text("msr 1 1\nutd 1 2\n")

        manifest = build_manifest(str(tmp_path), read_label_mapping(str(mapping_path)))

        assert len(manifest) == 2
        assert [(e.source_tag, e.label) for e in manifest] == [("msr", 1), ("utd", 2)]
        assert manifest.entry_for("utd", SampleId(1, 1, 1)).label == 2
        assert manifest.entry_for(".", SampleId(1, 1, 1)) is None

    def test_duplicate_sample_ids_within_a_source(self, tmp_path):
        _write_sample(str(tmp_path / "msr" / "x"), 1, 1, 1)
        _write_sample(str(tmp_path / "msr" / "y"), 1, 1, 1)
        with pytest.raises(DuplicateSampleIdError):
            build_manifest(str(tmp_path))

    def test_combined_datasets_with_mapping(self, tmp_path):
        _write_sample(str(tmp_path / "msr"), 1, 1, 1)
        _write_sample(str(tmp_path / "msr"), 2, 2, 1)
        _write_sample(str(tmp_path / "utd"), 5, 3, 1)
        mapping_path = tmp_path / "mapping.txt"
        mapping_path.write_text("# combined\nmsr 1 1\nmsr 2 2\nutd 5 3  # wave\n")

        manifest = build_manifest(str(tmp_path), read_label_mapping(str(mapping_path)))

        assert manifest.class_count == 3
        assert [(e.sample_id.action_id, e.label, e.source_tag) for e in manifest] == \
            [(1, 1, "msr"), (2, 2, "msr"), (5, 3, "utd")]

    def test_mapping_gap(self, tmp_path):
        _write_sample(str(tmp_path / "msr"), 1, 1, 1)
        _write_sample(str(tmp_path / "msr"), 2, 1, 1)
        with pytest.raises(LabelMappingGapError):
            build_manifest(str(tmp_path), {("msr", 1): 1})

    def test_malformed_mapping_file(self, tmp_path):
        path = tmp_path / "mapping.txt"
        path.write_text("msr 1\n")
        with pytest.raises(LabelMappingFormatError):
            read_label_mapping(str(path))

    def test_odd_train_split(self, tmp_path):
        for subject in range(1, 5):
            _write_sample(str(tmp_path), 1, subject, 1)
        manifest = build_manifest(str(tmp_path))

        train, test = split(manifest, SplitRule.odd_train())

        assert train.subjects() == [1, 3]
        assert test.subjects() == [2, 4]
        assert len(train) + len(test) == len(manifest)

    def test_explicit_split_must_cover_every_subject(self, tmp_path):
        for subject in range(1, 4):
            _write_sample(str(tmp_path), 1, subject, 1)
        manifest = build_manifest(str(tmp_path))

        train, test = split(manifest, SplitRule.explicit([1, 2], [3]))
        assert (train.subjects(), test.subjects()) == ([1, 2], [3])
        with pytest.raises(ManifestError):
            split(manifest, SplitRule.explicit([1], [3]))

    def test_explicit_split_rejects_overlap(self):
        with pytest.raises(ValueError):
            SplitRule.explicit([1, 2], [2, 3])

    def test_empty_split_side_is_returned(self, tmp_path):
        _write_sample(str(tmp_path), 1, 1, 1)
        train, test = split(build_manifest(str(tmp_path)), SplitRule.odd_train())
        assert len(train) == 1
        assert len(test) == 0

    def test_manifest_csv_round_trip(self, tmp_path):
        _write_sample(str(tmp_path / "msr"), 1, 1, 1)
        _write_sample(str(tmp_path / "msr"), 2, 1, 2)
        manifest = build_manifest(str(tmp_path))
        path = str(tmp_path / "manifest.csv")

        write_manifest(manifest, path)
        read_back = read_manifest(path)

        assert [e.to_dict() for e in read_back] == [e.to_dict() for e in manifest]
        assert read_back.class_count == 2


def test_synthetic_dataset(tmp_path):
    paths = generate_synthetic_dataset(str(tmp_path), sequences_per_class=4, subject_count=2)
    manifest = build_manifest(str(tmp_path))

    assert len(paths) == 12
    assert manifest.class_count == len(SyntheticActions.VALUES)
    assert manifest.subjects() == [1, 2]
    seq = read_sequence(paths[0])
    assert (seq.frame_count, seq.height, seq.width) == (16, 32, 32)
    assert seq.frames.max() > 0

import csv
import inspect
import json
import os

import numpy as np
import pytest

from classify import SoftmaxRegressionModel, FeatureDimensionMismatchError
from depth_io import SampleId, build_manifest
from depth_io.synthetic_actions import generate_synthetic_dataset
from encode_augment import enumerate_training_set
from fuse_eval import (SampleResult, fuse_scales, fuse_planes, predict_sample, build_report, evaluate, write_report,
                       write_confusion_matrix_csv, FusionError)
from hdmm import ExtractionConfig, WeightParams
from projection import ViewPlanes


class TestFusion(object):
    def test_fuse_scales_is_the_mean(self):
        fused = fuse_scales([np.array([0.8, 0.2]), np.array([0.4, 0.6])])
        assert fused.tolist() == pytest.approx([0.6, 0.4])

    def test_single_scale_is_unchanged(self):
        scores = np.array([0.1, 0.7, 0.2])
        np.testing.assert_array_equal(fuse_scales([scores]), scores)

    def test_fuse_planes_is_the_mean(self):
        fused = fuse_planes({"f": np.array([1.0, 0.0]), "s": np.array([0.0, 1.0]), "t": np.array([0.5, 0.5])})
        assert fused.tolist() == pytest.approx([0.5, 0.5])

    def test_fused_scores_stay_on_the_simplex(self):
        rng = np.random.default_rng(26)
        for _ in range(50):
            scores = [rng.dirichlet(np.ones(4)) for _ in range(int(rng.integers(1, 6)))]
            assert fuse_scales(scores).sum() == pytest.approx(1, abs=1e-9)

    def test_empty(self):
        with pytest.raises(FusionError):
            fuse_scales([])

    def test_class_count_mismatch(self):
        with pytest.raises(FusionError):
            fuse_scales([np.array([0.5, 0.5]), np.array([0.2, 0.3, 0.5])])

    def test_missing_plane(self):
        with pytest.raises(FusionError):
            fuse_planes({"f": np.array([1.0]), "s": np.array([1.0])})


def _result(action, subject, true_label, predicted_label, source_tag="."):
    scores = np.zeros(3)
    scores[predicted_label - 1] = 1
    return SampleResult(SampleId(action, subject, 1), source_tag, true_label, predicted_label, scores)


def _six_results():
    return [
        _result(1, 2, 1, 1, "msr"),
        _result(1, 4, 1, 2, "msr"),
        _result(2, 2, 2, 2, "msr"),
        _result(2, 4, 2, 2, "utd"),
        _result(3, 2, 3, 1, "utd"),
        _result(3, 4, 3, 3, "utd"),
    ]


class TestReport(object):
    def test_hand_tallied_confusion_matrix(self):
        report = build_report(_six_results(), 3)

        assert report.confusion_matrix.tolist() == [[1, 1, 0], [0, 2, 0], [1, 0, 1]]
        assert report.accuracy == pytest.approx(4 / 6)
        assert report.per_class_accuracy == {1: 0.5, 2: 1.0, 3: 0.5}
        assert report.per_source == {
            "msr": {"correct": 2, "total": 3, "accuracy": pytest.approx(2 / 3)},
            "utd": {"correct": 2, "total": 3, "accuracy": pytest.approx(2 / 3)}
        }
        assert report.per_subject[2] == {"correct": 2, "total": 3, "accuracy": pytest.approx(2 / 3)}

    def test_errors_are_excluded_from_the_denominator(self):
        results = _six_results() + [SampleResult(SampleId(1, 6, 1), ".", 1, error="truncated")]
        report = build_report(results, 3)

        assert report.evaluated_count == 6
        assert report.accuracy == pytest.approx(4 / 6)
        assert report.errors == [{"sample": "SampleId(1, 6, 1)", "source": ".", "error": "truncated"}]

    def test_is_independent_of_result_order(self):
        results = _six_results()
        forward = build_report(results, 3).to_dict()
        backward = build_report(list(reversed(results)), 3).to_dict()
        assert json.dumps(forward, sort_keys=True) == json.dumps(backward, sort_keys=True)

    def test_classes_without_samples(self):
        report = build_report([_result(1, 1, 1, 1)], 3)
        assert report.per_class_accuracy == {1: 1.0, 2: None, 3: None}

    def test_no_classified_samples(self):
        report = build_report([SampleResult(SampleId(1, 1, 1), ".", 1, error="boom")], 2)
        assert report.accuracy is None
        assert report.confusion_matrix.tolist() == [[0, 0], [0, 0]]

    def test_write_report_and_csv(self, tmp_path):
        report = build_report(_six_results(), 3, settings={"scales": [1, 2]})
        report_path = tmp_path / "out" / "report.json"
        csv_path = tmp_path / "confusion.csv"

        write_report(report, str(report_path))
        write_confusion_matrix_csv(report, str(csv_path))

        written = json.loads(report_path.read_text())
        assert written["accuracy"] == pytest.approx(4 / 6)
        assert written["confusion_matrix"] == [[1, 1, 0], [0, 2, 0], [1, 0, 1]]
        assert written["settings"] == {"scales": [1, 2]}
        with open(csv_path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows == [["true\\predicted", "1", "2", "3"], ["1", "1", "1", "0"], ["2", "0", "2", "0"],
                        ["3", "1", "0", "1"]]


class TestEvaluate(object):
    @pytest.fixture
    def manifest(self, tmp_path):
        data_dir = str(tmp_path / "data")
        paths = generate_synthetic_dataset(data_dir, sequences_per_class=1, subject_count=1, frame_count=6)
        with open(paths[0], "r+b") as f:
            f.truncate(os.path.getsize(paths[0]) - 1)
        return build_manifest(data_dir)

    def test_unreadable_samples_become_error_rows(self, manifest):
        models = {plane: SoftmaxRegressionModel.zeros(3, 3 * 4 ** 2) for plane in ViewPlanes.VALUES}
        report = evaluate(manifest, models, [1], ExtractionConfig(depth_bins=16), canvas_size=16, crop_size=12,
                          feature_side=4)

        assert report.evaluated_count == 2
        assert len(report.errors) == 1
        assert report.errors[0]["sample"] == "SampleId(1, 1, 1)"
        assert report.errors[0]["source"] == "."

    def test_model_dimension_mismatch_is_raised(self, manifest):
        models = {plane: SoftmaxRegressionModel.zeros(3, 5) for plane in ViewPlanes.VALUES}
        with pytest.raises(FeatureDimensionMismatchError):
            evaluate(manifest, models, [1], ExtractionConfig(depth_bins=16), canvas_size=16, crop_size=12,
                     feature_side=4)


@pytest.mark.parametrize("function", [predict_sample, evaluate, enumerate_training_set])
def test_weighted_accumulation_is_the_default(function):
    default = inspect.signature(function).parameters["weights"].default
    assert isinstance(default, WeightParams)
    assert (default.gamma, default.delta) == (0.99, 1.0)

import csv
import json
import os

import numpy as np
from core_data_modules.logging import Logger
from sklearn.metrics import confusion_matrix

from classify.softmax_regression import featurize, predict
from depth_io.data_models import InvalidDepthSequenceError
from depth_io.depth_sequence_io import read_sequence, DepthFileError
from encode_augment.encode_augment import encode, center_crop
from fuse_eval.data_models import SampleResult, EvalReport
from fuse_eval.fusion import fuse_scales, fuse_planes
from hdmm.data_models import WeightParams
from hdmm.hdmm import extract_hdmm, ExtractionError
from projection.data_models import ViewPlanes

log = Logger(__name__)


def score_motion_maps(motion_maps, models, canvas_size=256, crop_size=224, feature_side=32):
    """
    Scores unrotated motion maps with each plane's model and fuses the scores, across scales within each plane and
    then across planes.

    :param motion_maps: Motion maps of one sequence, for every plane at one or more scales.
    :type motion_maps: list of hdmm.data_models.MotionMap
    :param models: Dictionary of plane -> model.
    :type models: dict of str -> classify.data_models.SoftmaxRegressionModel
    :return: Fused class posteriors.
    :rtype: numpy.ndarray
    """
    scores = {plane: [] for plane in ViewPlanes.VALUES}
    for motion_map in motion_maps:
        image = center_crop(encode(motion_map, canvas_size), crop_size)
        scores[motion_map.plane].append(predict(models[motion_map.plane], featurize(image, feature_side)))

    return fuse_planes({plane: fuse_scales(plane_scores) for plane, plane_scores in scores.items()})


def predict_sample(sequence, models, scales, cfg, weights=WeightParams(), canvas_size=256, crop_size=224,
                   feature_side=32):
    """
    Classifies a depth sequence from its unrotated motion maps.

    Each motion map is encoded, centre cropped, featurized and scored by its plane's model. Scores are fused across
    scales within each plane, then across planes.

    :param sequence: Sequence to classify.
    :type sequence: depth_io.data_models.DepthSequence
    :param models: Dictionary of plane -> model.
    :type models: dict of str -> classify.data_models.SoftmaxRegressionModel
    :param scales: Temporal scales to extract.
    :type scales: list of int
    :param cfg: Extraction settings.
    :type cfg: hdmm.data_models.ExtractionConfig
    :param weights: Weights for weighted accumulation, or None to sum the differences.
    :type weights: hdmm.data_models.WeightParams | None
    :param canvas_size: Side of the encoded images.
    :type canvas_size: int
    :param crop_size: Side of the centre crop.
    :type crop_size: int
    :param feature_side: Side of the featurized images.
    :type feature_side: int
    :return: Fused class posteriors.
    :rtype: numpy.ndarray
    """
    motion_maps = extract_hdmm(sequence, None, scales, weights, cfg)
    return score_motion_maps(motion_maps, models, canvas_size, crop_size, feature_side)


def _summarise(results):
    correct = sum(1 for r in results if r.predicted_label == r.true_label)
    return {
        "correct": correct,
        "total": len(results),
        "accuracy": correct / len(results) if len(results) > 0 else None
    }


def build_report(results, class_count, settings=None):
    """
    Summarises sample results as an evaluation report.

    :param results: Results of every test sample, in any order.
    :type results: iterable of fuse_eval.data_models.SampleResult
    :param class_count: Number of classes K.
    :type class_count: int
    :param settings: Settings to echo into the report.
    :type settings: dict | None
    :rtype: fuse_eval.data_models.EvalReport
    """
    results = sorted(results, key=lambda r: (r.sample_id, r.source_tag))
    classified = [r for r in results if not r.is_error]
    labels = list(range(1, class_count + 1))

    if len(classified) > 0:
        matrix = confusion_matrix([r.true_label for r in classified], [r.predicted_label for r in classified],
                                  labels=labels)
    else:
        matrix = np.zeros((class_count, class_count), dtype=np.int64)

    row_totals = matrix.sum(axis=1)
    per_class_accuracy = {
        label: float(matrix[label - 1, label - 1] / row_totals[label - 1]) if row_totals[label - 1] > 0 else None
        for label in labels
    }

    per_source = dict()
    for source_tag in sorted({r.source_tag for r in classified}):
        per_source[source_tag] = _summarise([r for r in classified if r.source_tag == source_tag])

    per_subject = dict()
    for subject_id in sorted({r.sample_id.subject_id for r in classified}):
        per_subject[subject_id] = _summarise([r for r in classified if r.sample_id.subject_id == subject_id])

    overall = _summarise(classified)
    errors = [{"sample": repr(r.sample_id), "source": r.source_tag, "error": r.error} for r in results if r.is_error]
    return EvalReport(
        overall["accuracy"], overall["correct"], overall["total"], per_class_accuracy, matrix, per_source,
        per_subject, errors, settings
    )


def evaluate(manifest, models, scales, cfg, weights=WeightParams(), canvas_size=256, crop_size=224, feature_side=32,
             settings=None):
    """
    Classifies every sample of a test manifest and reports the results.

    Samples whose depth file cannot be read or whose motion maps cannot be extracted are reported as errors and
    excluded from the accuracy. Any other failure, such as models that don't match the features, is raised.

    :param manifest: Test manifest.
    :type manifest: depth_io.data_models.DatasetManifest
    :param models: Dictionary of plane -> model.
    :type models: dict of str -> classify.data_models.SoftmaxRegressionModel
    :param settings: Settings to echo into the report.
    :type settings: dict | None
    :rtype: fuse_eval.data_models.EvalReport
    """
    results = []
    for i, entry in enumerate(manifest):
        try:
            motion_maps = extract_hdmm(read_sequence(entry.path), None, scales, weights, cfg)
        except (DepthFileError, InvalidDepthSequenceError, ExtractionError, OSError) as e:
            log.warning(f"Failed to extract sample {entry.sample_id} of source '{entry.source_tag}': {e}")
            results.append(SampleResult(entry.sample_id, entry.source_tag, entry.label, error=str(e)))
            continue

        scores = score_motion_maps(motion_maps, models, canvas_size, crop_size, feature_side)
        # np.argmax returns the first maximum, so ties go to the lowest class.
        predicted_label = int(np.argmax(scores)) + 1
        results.append(SampleResult(entry.sample_id, entry.source_tag, entry.label, predicted_label, scores))
        log.debug(f"Sample {i + 1}/{len(manifest)} {entry.sample_id}: true {entry.label}, predicted {predicted_label}")

    report = build_report(results, manifest.class_count, settings)
    log.info(f"Classified {report.correct_count}/{report.evaluated_count} test samples correctly, "
             f"{len(report.errors)} samples failed")
    return report


def write_report(report, path):
    parent = os.path.dirname(path)
    if parent != "":
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
    log.info(f"Wrote evaluation report to '{path}'")


def write_confusion_matrix_csv(report, path):
    """
    Writes a report's confusion matrix as a CSV, one row per true label and one column per predicted label.
    """
    labels = list(range(1, report.class_count + 1))
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["true\\predicted"] + labels)
        for label, row in zip(labels, report.confusion_matrix.tolist()):
            writer.writerow([label] + row)

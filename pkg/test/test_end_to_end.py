import numpy as np
import pytest

from classify import TrainConfig, train_plane_models
from depth_io import SplitRule, build_manifest, split, read_sequence
from depth_io.synthetic_actions import generate_synthetic_dataset, SyntheticActions
from encode_augment import AugmentSpec, enumerate_training_set
from fuse_eval import evaluate, predict_sample
from geometry import RotationGrid
from hdmm import ExtractionConfig, WeightParams

SCALES = [1, 2]
CANVAS_SIZE = 32
CROP_SIZE = 28
FEATURE_SIDE = 16


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = str(tmp_path_factory.mktemp("synthetic"))
    generate_synthetic_dataset(root, sequences_per_class=20, subject_count=10, frame_count=16, size=32)
    train_manifest, test_manifest = split(build_manifest(root), SplitRule.odd_train())

    cfg = ExtractionConfig(depth_bins=32)
    stream = enumerate_training_set(train_manifest, RotationGrid.none(), SCALES, AugmentSpec(crop_size=CROP_SIZE,
                                    seed=5), cfg, WeightParams(), canvas_size=CANVAS_SIZE)
    models = train_plane_models(stream, train_manifest.class_count,
                                TrainConfig(learning_rate=0.01, batch_size=10, epochs=40, seed=5), side=FEATURE_SIDE)
    return train_manifest, test_manifest, models, cfg


def test_split_is_by_subject(trained):
    train_manifest, test_manifest, _, _ = trained
    assert len(train_manifest) == 30
    assert len(test_manifest) == 30
    assert all(subject % 2 == 1 for subject in train_manifest.subjects())
    assert all(subject % 2 == 0 for subject in test_manifest.subjects())


def test_synthetic_actions_are_recognised(trained):
    _, test_manifest, models, cfg = trained
    report = evaluate(test_manifest, models, SCALES, cfg, WeightParams(), canvas_size=CANVAS_SIZE,
                      crop_size=CROP_SIZE, feature_side=FEATURE_SIDE)

    assert report.errors == []
    assert report.evaluated_count == 30
    assert report.accuracy >= 0.95
    assert report.confusion_matrix.sum(axis=1).tolist() == [10, 10, 10]
    assert report.accuracy == pytest.approx(np.trace(report.confusion_matrix) / 30)


def test_move_up_sample_is_classified_as_move_up(trained):
    _, test_manifest, models, cfg = trained
    entry = [e for e in test_manifest if e.label == SyntheticActions.TRANSLATE_UP][0]

    scores = predict_sample(read_sequence(entry.path), models, [1], cfg, WeightParams(), canvas_size=CANVAS_SIZE,
                            crop_size=CROP_SIZE, feature_side=FEATURE_SIDE)

    assert int(np.argmax(scores)) + 1 == SyntheticActions.TRANSLATE_UP

import json

import pytest

from configuration import PipelineConfiguration, ConfigurationError
from geometry import rotation_grid


def test_defaults():
    config = PipelineConfiguration.from_dict({})

    assert config.extraction_config().z_min == 500
    assert config.extraction_config().z_max == 4500
    assert config.extraction_config().depth_bins == 320
    assert len(rotation_grid(config.rotation_grid())) == 15
    assert config.rotation_grid().pivot_depth is None
    assert config.scales == [1]
    assert (config.weight_params().gamma, config.weight_params().delta) == (0.99, 1.0)
    spec = config.augment_spec()
    assert (spec.crop_size, spec.flip, spec.jitter, spec.seed, spec.copies) == (224, True, 10, 0, 1)
    train = config.train_config()
    assert (train.learning_rate, train.momentum, train.weight_decay, train.batch_size, train.epochs) == \
        (0.01, 0.9, 0.0005, 256, 100)
    assert train.fine_tune_learning_rate == 0.001


def test_dict_round_trip():
    d = {
        "intrinsics": {"focal_length": 365.0, "cx": 100.0, "cy": None},
        "depth_band": {"z_min": 800, "z_max": 4000},
        "theta_grid": "-15:15:15",
        "beta_grid": "0",
        "scales": [1, 3, 5],
        "weighted": False,
        "augment": {"crop_size": 28, "jitter": 0},
        "canvas_size": 32,
        "train": {"epochs": 10},
        "seed": 4
    }
    config = PipelineConfiguration.from_dict(d)

    assert config.weight_params() is None
    assert config.train_config().seed == 4
    assert config.train_config().epochs == 10
    assert PipelineConfiguration.from_dict(config.to_dict()).to_dict() == config.to_dict()
    assert config.to_dict()["theta_grid"] == "-15:15:15"


@pytest.mark.parametrize("d", [
    {"colour": "red"},
    {"train": {"learning_rat": 0.1}},
    {"augment": {"crop_size": 300}},
    {"scales": [0]},
    {"depth_band": {"z_min": 5000, "z_max": 100}},
    {"theta_grid": "0:7:10"},
    {"gamma": 0},
])
def test_invalid_configurations(d):
    with pytest.raises(ValueError):
        PipelineConfiguration.from_dict(d)


@pytest.mark.parametrize("key, grid", [("theta_grid", "-7.5:7.5:7.5"), ("beta_grid", "2.5")])
def test_fractional_angle_grids_are_rejected(key, grid):
    with pytest.raises(ConfigurationError) as e:
        PipelineConfiguration.from_dict({key: grid})
    assert key in str(e.value)


def test_unknown_keys_are_configuration_errors():
    with pytest.raises(ConfigurationError):
        PipelineConfiguration.from_dict({"intrinsics": {"fx": 1}})


def test_load(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"scales": [2]}))
    assert PipelineConfiguration.load(str(path)).scales == [2]

    path.write_text("{not json")
    with pytest.raises(ConfigurationError):
        PipelineConfiguration.load(str(path))

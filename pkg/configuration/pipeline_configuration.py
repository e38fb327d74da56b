import json

from core_data_modules.logging import Logger

from classify.data_models import TrainConfig
from encode_augment.data_models import AugmentSpec
from geometry.data_models import AngleGrid, RotationGrid, DEFAULT_FOCAL_LENGTH
from hdmm.data_models import ExtractionConfig, WeightParams, validate_scale

log = Logger(__name__)


class ConfigurationError(ValueError):
    pass


_TOP_LEVEL_KEYS = {"intrinsics", "depth_band", "theta_grid", "beta_grid", "pivot_depth", "depth_bins",
                   "bounds_expansion", "scales", "weighted", "gamma", "delta", "canvas_size", "augment",
                   "feature_side", "train", "seed"}
_INTRINSICS_KEYS = {"focal_length", "cx", "cy"}
_DEPTH_BAND_KEYS = {"z_min", "z_max"}
_AUGMENT_KEYS = {"crop_size", "flip", "jitter", "copies"}
_TRAIN_KEYS = {"learning_rate", "fine_tune_learning_rate", "momentum", "weight_decay", "batch_size", "epochs",
               "lr_decay_every", "lr_decay_factor"}


def _check_keys(d, allowed, section):
    if not isinstance(d, dict):
        raise ConfigurationError(f"Configuration section '{section}' must be an object")
    unknown = set(d.keys()) - allowed
    if len(unknown) > 0:
        raise ConfigurationError(f"Unknown configuration keys in '{section}': {sorted(unknown)}")


class PipelineConfiguration(object):
    def __init__(self, focal_length=DEFAULT_FOCAL_LENGTH, cx=None, cy=None, z_min=500, z_max=4500,
                 theta_grid="-30:15:30", beta_grid="-5:5:5", pivot_depth=None, depth_bins=320,
                 bounds_expansion=0.05, scales=(1,), weighted=True, gamma=0.99, delta=1.0, canvas_size=256,
                 crop_size=224, flip=True, jitter=10, copies=1, feature_side=32, train=None, seed=0):
        """
        Every tunable setting of the extraction, augmentation, training and evaluation pipeline.

        :param theta_grid: Theta rotation grid, as "start:step:stop".
        :type theta_grid: str
        :param beta_grid: Beta rotation grid, as "start:step:stop".
        :type beta_grid: str
        :param scales: Temporal scales to extract.
        :type scales: iterable of int
        :param weighted: Whether to use weighted accumulation (with gamma and delta) rather than a plain sum.
        :type weighted: bool
        :param train: Training settings other than the seed. Defaults to `TrainConfig()`'s defaults.
        :type train: classify.data_models.TrainConfig | None
        :param seed: Seed of augmentation and training.
        :type seed: int

        See `ExtractionConfig`, `WeightParams` and `AugmentSpec` for the remaining parameters.
        """
        self.focal_length = focal_length
        self.cx = cx
        self.cy = cy
        self.z_min = z_min
        self.z_max = z_max
        self.theta_grid = AngleGrid.parse(theta_grid) if isinstance(theta_grid, str) else theta_grid
        self.beta_grid = AngleGrid.parse(beta_grid) if isinstance(beta_grid, str) else beta_grid
        self.pivot_depth = pivot_depth
        self.depth_bins = depth_bins
        self.bounds_expansion = bounds_expansion
        self.scales = [validate_scale(scale) for scale in scales]
        self.weighted = weighted
        self.gamma = gamma
        self.delta = delta
        self.canvas_size = canvas_size
        self.crop_size = crop_size
        self.flip = flip
        self.jitter = jitter
        self.copies = copies
        self.feature_side = feature_side
        self.train = TrainConfig() if train is None else train
        self.seed = seed

        if len(self.scales) == 0:
            raise ConfigurationError("At least one temporal scale is required")
        if crop_size > canvas_size:
            raise ConfigurationError(f"crop_size ({crop_size}) must not exceed canvas_size ({canvas_size})")
        for name, grid in [("theta_grid", self.theta_grid), ("beta_grid", self.beta_grid)]:
            fractional = [angle for angle in grid.values() if angle != int(angle)]
            if len(fractional) > 0:
                raise ConfigurationError(f"{name} '{grid}' must hold whole degrees only, but has {fractional}")

        # Builds each component once so invalid values are reported on load.
        self.extraction_config()
        self.rotation_grid()
        self.weight_params()
        self.augment_spec()

    def extraction_config(self):
        return ExtractionConfig(self.z_min, self.z_max, self.depth_bins, self.bounds_expansion, self.focal_length,
                                self.cx, self.cy)

    def rotation_grid(self):
        return RotationGrid(self.theta_grid, self.beta_grid, self.pivot_depth)

    def weight_params(self):
        """
        :return: The weighted accumulation weights, or None if accumulation is unweighted.
        :rtype: hdmm.data_models.WeightParams | None
        """
        return WeightParams(self.gamma, self.delta) if self.weighted else None

    def augment_spec(self):
        return AugmentSpec(self.crop_size, self.flip, self.jitter, self.seed, self.copies)

    def train_config(self):
        d = self.train.to_dict()
        d["seed"] = self.seed
        return TrainConfig.from_dict(d)

    @classmethod
    def from_dict(cls, d):
        """
        Reads a configuration, taking defaults for missing keys. Unknown keys are rejected.

        :type d: dict
        :rtype: PipelineConfiguration
        """
        _check_keys(d, _TOP_LEVEL_KEYS, "configuration")
        kwargs = {key: d[key] for key in _TOP_LEVEL_KEYS - {"intrinsics", "depth_band", "augment", "train"}
                  if key in d}

        for section, allowed in [("intrinsics", _INTRINSICS_KEYS), ("depth_band", _DEPTH_BAND_KEYS),
                                 ("augment", _AUGMENT_KEYS)]:
            values = d.get(section, dict())
            _check_keys(values, allowed, section)
            kwargs.update(values)

        train = d.get("train", dict())
        _check_keys(train, _TRAIN_KEYS, "train")
        kwargs["train"] = TrainConfig(**train)

        try:
            return cls(**kwargs)
        except (TypeError, AssertionError) as e:
            raise ConfigurationError(f"Invalid configuration: {e}")

    def to_dict(self):
        train = self.train.to_dict()
        train.pop("seed")
        return {
            "intrinsics": {"focal_length": self.focal_length, "cx": self.cx, "cy": self.cy},
            "depth_band": {"z_min": self.z_min, "z_max": self.z_max},
            "theta_grid": str(self.theta_grid),
            "beta_grid": str(self.beta_grid),
            "pivot_depth": self.pivot_depth,
            "depth_bins": self.depth_bins,
            "bounds_expansion": self.bounds_expansion,
            "scales": list(self.scales),
            "weighted": self.weighted,
            "gamma": self.gamma,
            "delta": self.delta,
            "canvas_size": self.canvas_size,
            "augment": {"crop_size": self.crop_size, "flip": self.flip, "jitter": self.jitter,
                        "copies": self.copies},
            "feature_side": self.feature_side,
            "train": train,
            "seed": self.seed
        }

    @classmethod
    def load(cls, path):
        """
        Loads a configuration from a JSON file.

        :type path: str
        :rtype: PipelineConfiguration
        """
        with open(path, "r", encoding="utf-8") as f:
            try:
                d = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"Configuration file '{path}' is not valid JSON: {e}")
        log.info(f"Loaded pipeline configuration from '{path}'")
        return cls.from_dict(d)

import math

from geometry.data_models import Intrinsics, DEFAULT_FOCAL_LENGTH
from projection.data_models import ViewPlanes


def validate_scale(scale):
    """
    Checks that `scale` is a valid temporal scale, i.e. an integer frame step >= 1.
    """
    if isinstance(scale, bool) or int(scale) != scale or scale < 1:
        raise ValueError(f"Temporal scales must be integers >= 1, got {scale}")
    return int(scale)


class WeightParams(object):
    def __init__(self, gamma=0.99, delta=1.0):
        """
        Weights of the weighted motion map recursion H = gamma * |current - previous| + delta * H.

        :param gamma: Weight of the newest frame difference. Must be finite and > 0.
        :type gamma: float
        :param delta: Weight of the history so far. Must be finite and > 0.
        :type delta: float
        """
        for name, value in [("gamma", gamma), ("delta", delta)]:
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {value}")

        self.gamma = float(gamma)
        self.delta = float(delta)


class ExtractionConfig(object):
    def __init__(self, z_min=500, z_max=4500, depth_bins=320, bounds_expansion=0.05,
                 focal_length=DEFAULT_FOCAL_LENGTH, cx=None, cy=None):
        """
        Settings for extracting motion maps from a depth sequence.

        :param z_min: Nearest depth of the foreground band, in millimeters.
        :type z_min: float
        :param z_max: Furthest depth of the foreground band, in millimeters.
        :type z_max: float
        :param depth_bins: Number of bins along Z in the side and top projections.
        :type depth_bins: int
        :param bounds_expansion: Fraction each axis of the projection bounds is widened by.
        :type bounds_expansion: float
        :param focal_length: Camera focal length, in pixels.
        :type focal_length: float
        :param cx: Principal point column, or None for the image centre.
        :type cx: float | None
        :param cy: Principal point row, or None for the image centre.
        :type cy: float | None
        """
        if z_min > z_max:
            raise ValueError(f"Depth band [{z_min}, {z_max}] is empty")
        if depth_bins < 1:
            raise ValueError(f"depth_bins must be >= 1, got {depth_bins}")
        if bounds_expansion < 0:
            raise ValueError(f"bounds_expansion must be >= 0, got {bounds_expansion}")

        self.z_min = z_min
        self.z_max = z_max
        self.depth_bins = int(depth_bins)
        self.bounds_expansion = bounds_expansion
        self.focal_length = focal_length
        self.cx = cx
        self.cy = cy

    def intrinsics_for(self, width, height):
        return Intrinsics.default_for(width, height, self.focal_length, self.cx, self.cy)


class MotionMap(object):
    def __init__(self, plane, scale, grid, frames_used, theta=0.0, beta=0.0):
        """
        Motion accumulated over a depth sequence on one view plane at one temporal scale.

        :param plane: One of `ViewPlanes.VALUES`.
        :type plane: str
        :param scale: Temporal scale the map was accumulated at.
        :type scale: int
        :param grid: Non-negative map of accumulated motion.
        :type grid: numpy.ndarray
        :param frames_used: Number of frame differences accumulated into the map.
        :type frames_used: int
        :param theta: Theta of the virtual camera rotation the map was extracted under, in degrees.
        :type theta: float
        :param beta: Beta of the virtual camera rotation the map was extracted under, in degrees.
        :type beta: float
        """
        assert plane in ViewPlanes.VALUES, plane
        assert grid.ndim == 2

        self.plane = plane
        self.scale = validate_scale(scale)
        self.grid = grid
        self.frames_used = frames_used
        self.theta = theta
        self.beta = beta

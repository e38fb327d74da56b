import numpy as np
from core_data_modules.logging import Logger

from projection.data_models import ViewPlanes, ProjectionBounds, ProjectedMap

log = Logger(__name__)

_X, _Y, _Z = 0, 1, 2

# Per plane: (row axis, column axis, value axis). Rows along Y run top-down, so they are flipped.
_PLANE_AXES = {
    ViewPlanes.FRONT: (_Y, _X, _Z),
    ViewPlanes.SIDE: (_Y, _Z, _X),
    ViewPlanes.TOP: (_Z, _X, _Y)
}


def segment_foreground(frame, z_min, z_max):
    """
    Keeps only the pixels of a depth frame whose depth lies within [z_min, z_max]. All other pixels are set to 0.

    :param frame: Depth frame of shape (height, width), in millimeters.
    :type frame: numpy.ndarray
    :param z_min: Nearest depth to keep, in millimeters.
    :type z_min: float
    :param z_max: Furthest depth to keep, in millimeters. Must be >= z_min.
    :type z_max: float
    :rtype: numpy.ndarray
    """
    if z_min > z_max:
        raise ValueError(f"Depth band [{z_min}, {z_max}] is empty")

    frame = np.asarray(frame)
    return np.where((frame >= z_min) & (frame <= z_max), frame, 0).astype(frame.dtype)


def compute_bounds(clouds, expansion=0.05):
    """
    Computes the box enclosing every point of the given clouds, with each axis widened by `expansion` of its extent,
    half on each side and never less than 1mm per side.

    :param clouds: Clouds to enclose. May be any iterable, it is consumed once.
    :type clouds: iterable of geometry.data_models.PointCloud
    :param expansion: Fraction of each axis' extent to widen the box by.
    :type expansion: float
    :rtype: projection.data_models.ProjectionBounds
    """
    assert expansion >= 0, f"expansion must be >= 0, got {expansion}"

    lower = np.full(3, np.inf)
    upper = np.full(3, -np.inf)
    for cloud in clouds:
        if len(cloud) == 0:
            continue
        lower = np.minimum(lower, cloud.points.min(axis=0))
        upper = np.maximum(upper, cloud.points.max(axis=0))

    if not np.all(np.isfinite(lower)):
        raise ValueError("Cannot compute projection bounds of clouds with no points")

    padding = np.maximum((upper - lower) * expansion / 2, 1.0)
    return ProjectionBounds(lower - padding, upper + padding)


def grid_shape(plane, height, width, depth_bins):
    """
    :return: (rows, cols) of the projection grid of `plane` for frames of the given size.
    :rtype: (int, int)
    """
    assert plane in ViewPlanes.VALUES, plane
    if plane == ViewPlanes.FRONT:
        return height, width
    if plane == ViewPlanes.SIDE:
        return height, depth_bins
    return depth_bins, width


def _bin_indices(values, lower, upper, bins):
    indices = np.floor((values - lower) / (upper - lower) * bins).astype(np.int64)
    return np.clip(indices, 0, bins - 1)


def project(cloud, plane, bounds, shape):
    """
    Projects a point cloud onto one view plane.

    The front plane spans (X, Y) and holds Z, the side plane spans (Z, Y) and holds X, and the top plane spans (X, Z)
    and holds Y. Each cell stores the value minus the value axis' lower bound. Where several points land in one cell
    the smallest value is kept. Cells no point lands in are 0. Points outside `bounds` are dropped.

    :param cloud: Cloud to project.
    :type cloud: geometry.data_models.PointCloud
    :param plane: One of `ViewPlanes.VALUES`.
    :type plane: str
    :param bounds: Box the grid spans.
    :type bounds: projection.data_models.ProjectionBounds
    :param shape: (rows, cols) of the output grid, see `grid_shape`.
    :type shape: (int, int)
    :rtype: projection.data_models.ProjectedMap
    """
    assert plane in ViewPlanes.VALUES, plane
    rows, cols = shape
    assert rows > 0 and cols > 0, f"Grid shape must be positive, got {shape}"
    row_axis, col_axis, value_axis = _PLANE_AXES[plane]

    inside = bounds.contains(cloud.points)
    dropped = int(np.count_nonzero(~inside))
    if dropped > 0:
        log.warning(f"Dropped {dropped} of {len(cloud)} points outside the projection bounds of plane '{plane}'")
    points = cloud.points[inside]

    row_indices = _bin_indices(points[:, row_axis], bounds.lower[row_axis], bounds.upper[row_axis], rows)
    if row_axis == _Y:
        row_indices = rows - 1 - row_indices
    col_indices = _bin_indices(points[:, col_axis], bounds.lower[col_axis], bounds.upper[col_axis], cols)
    values = points[:, value_axis] - bounds.lower[value_axis]

    grid = np.full((rows, cols), np.inf)
    np.minimum.at(grid, (row_indices, col_indices), values)
    grid[np.isinf(grid)] = 0

    extent = bounds.extent
    return ProjectedMap(plane, grid, extent[row_axis] / rows, extent[col_axis] / cols, dropped_points=dropped)

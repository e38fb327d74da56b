import numpy as np
from core_data_modules.logging import Logger

from geometry.data_models import RotationParams
from geometry.geometry import depth_to_cloud, rotate_frame, rotation_grid, resolve_pivot_depth, NoForegroundError
from hdmm.data_models import MotionMap, validate_scale
from projection.data_models import ViewPlanes
from projection.projection import segment_foreground, compute_bounds, grid_shape, project

log = Logger(__name__)


class ExtractionError(ValueError):
    pass


class EmptyScaleError(ExtractionError):
    pass


class MapDimensionMismatchError(ExtractionError):
    pass


def subsample_indices(frame_count, scale):
    """
    Lists the frame pairs differenced at a temporal scale.

    At scale n the sequence is subsampled to frames 1, n + 1, 2n + 1, ..., and each subsampled frame is paired with
    the one before it.

    >>> subsample_indices(7, 3)
    [(4, 1), (7, 4)]

    :param frame_count: Number of frames N in the sequence.
    :type frame_count: int
    :param scale: Temporal scale n.
    :type scale: int
    :return: 1-based (current, previous) frame indices.
    :rtype: list of (int, int)
    """
    scale = validate_scale(scale)
    subsampled_count = (frame_count - 1) // scale + 1 if frame_count >= 1 else 0
    if subsampled_count < 2:
        raise EmptyScaleError(f"A sequence of {frame_count} frames has no frame pairs at scale {scale}")

    return [((t - 1) * scale + 1, (t - 2) * scale + 1) for t in range(2, subsampled_count + 1)]


def _validate_maps(maps):
    shapes = {m.shape for m in maps}
    if len(shapes) > 1:
        raise MapDimensionMismatchError(f"Projected maps have differing shapes {sorted(shapes)}")


def accumulate(maps, scale):
    """
    Sums the absolute differences between consecutive subsampled projected maps.

    :param maps: Projected maps of every frame of a sequence, all of one shape.
    :type maps: sequence of numpy.ndarray
    :param scale: Temporal scale.
    :type scale: int
    :rtype: numpy.ndarray
    """
    _validate_maps(maps)
    total = np.zeros(maps[0].shape, dtype=np.float64) if len(maps) > 0 else None
    for current, previous in subsample_indices(len(maps), scale):
        total += np.abs(np.asarray(maps[current - 1], dtype=np.float64) - maps[previous - 1])
    return total


def accumulate_weighted(maps, scale, weights):
    """
    Accumulates the absolute differences between consecutive subsampled projected maps with the recursion
    H = gamma * |current - previous| + delta * H, starting from H = 0.

    :param maps: Projected maps of every frame of a sequence, all of one shape.
    :type maps: sequence of numpy.ndarray
    :param scale: Temporal scale.
    :type scale: int
    :param weights: Recursion weights.
    :type weights: hdmm.data_models.WeightParams
    :rtype: numpy.ndarray
    """
    _validate_maps(maps)
    history = np.zeros(maps[0].shape, dtype=np.float64) if len(maps) > 0 else None
    for current, previous in subsample_indices(len(maps), scale):
        difference = np.abs(np.asarray(maps[current - 1], dtype=np.float64) - maps[previous - 1])
        history = weights.gamma * difference + weights.delta * history
    return history


def _segment(sequence, cfg):
    return np.stack([segment_foreground(frame, cfg.z_min, cfg.z_max) for frame in sequence.frames])


def _view_clouds(frames, params, intr):
    if params is None or params.is_identity():
        return [depth_to_cloud(frame, intr) for frame in frames]
    return [depth_to_cloud(rotate_frame(frame, params, intr), intr) for frame in frames]


def _motion_maps(clouds, bounds, scales, weights, cfg, height, width, theta=0.0, beta=0.0):
    projected = {}
    for plane in ViewPlanes.VALUES:
        shape = grid_shape(plane, height, width, cfg.depth_bins)
        projected[plane] = [project(cloud, plane, bounds, shape).grid for cloud in clouds]

    motion_maps = []
    for scale in scales:
        try:
            pairs = subsample_indices(len(clouds), scale)
        except EmptyScaleError as e:
            log.warning(f"Skipping scale {scale}: {e}")
            continue

        for plane in ViewPlanes.VALUES:
            if weights is None:
                grid = accumulate(projected[plane], scale)
            else:
                grid = accumulate_weighted(projected[plane], scale, weights)
            motion_maps.append(MotionMap(plane, scale, grid, len(pairs), theta, beta))

    if len(motion_maps) == 0:
        raise EmptyScaleError(f"None of the scales {list(scales)} are usable for a sequence of {len(clouds)} frames")
    return motion_maps


def _bounds_of(clouds, cfg):
    try:
        return compute_bounds(clouds, cfg.bounds_expansion)
    except ValueError:
        raise ExtractionError(f"Sequence has no foreground within the depth band [{cfg.z_min}, {cfg.z_max}]")


def extract_hdmm(sequence, params, scales, weights, cfg, bounds=None):
    """
    Extracts front, side and top motion maps of a depth sequence at each of the given temporal scales.

    Scales the sequence is too short for are skipped with a warning.

    :param sequence: Sequence to extract from.
    :type sequence: depth_io.data_models.DepthSequence
    :param params: Virtual camera rotation to render the sequence under, or None for the original view.
    :type params: geometry.data_models.RotationParams | None
    :param scales: Temporal scales to accumulate at.
    :type scales: iterable of int
    :param weights: Weights for weighted accumulation, or None to sum the differences.
    :type weights: hdmm.data_models.WeightParams | None
    :param cfg: Extraction settings.
    :type cfg: hdmm.data_models.ExtractionConfig
    :param bounds: Projection bounds to use, or None to fit them to this view of the sequence.
    :type bounds: projection.data_models.ProjectionBounds | None
    :return: Motion maps ordered by scale, then by plane.
    :rtype: list of hdmm.data_models.MotionMap
    """
    intr = cfg.intrinsics_for(sequence.width, sequence.height)
    clouds = _view_clouds(_segment(sequence, cfg), params, intr)
    if bounds is None:
        bounds = _bounds_of(clouds, cfg)

    theta, beta = (0.0, 0.0) if params is None else (params.theta, params.beta)
    return _motion_maps(clouds, bounds, scales, weights, cfg, sequence.height, sequence.width, theta, beta)


def extract_hdmm_grid(sequence, grid, scales, weights, cfg):
    """
    Extracts motion maps of a depth sequence under every rotation of a grid.

    Every view shares one set of projection bounds, fitted to all frames under all of the rotations.

    :param sequence: Sequence to extract from.
    :type sequence: depth_io.data_models.DepthSequence
    :param grid: Rotations to render the sequence under.
    :type grid: geometry.data_models.RotationGrid
    :param scales: Temporal scales to accumulate at.
    :type scales: iterable of int
    :param weights: Weights for weighted accumulation, or None to sum the differences.
    :type weights: hdmm.data_models.WeightParams | None
    :param cfg: Extraction settings.
    :type cfg: hdmm.data_models.ExtractionConfig
    :return: Dictionary of (theta, beta) -> motion maps ordered by scale, then by plane. Keys are in
             `rotation_grid` order.
    :rtype: dict of (float, float) -> list of hdmm.data_models.MotionMap
    """
    scales = list(scales)
    intr = cfg.intrinsics_for(sequence.width, sequence.height)
    frames = _segment(sequence, cfg)
    angles = rotation_grid(grid)

    pivot_depth = grid.pivot_depth
    if pivot_depth is None and any(theta != 0 or beta != 0 for theta, beta in angles):
        try:
            pivot_depth = resolve_pivot_depth(frames, intr)
        except NoForegroundError as e:
            raise ExtractionError(str(e))
        log.debug(f"Resolved rotation pivot depth {pivot_depth:.1f}mm")

    view_clouds = dict()
    for theta, beta in angles:
        params = None if theta == 0 and beta == 0 else RotationParams(theta, beta, pivot_depth)
        view_clouds[(theta, beta)] = _view_clouds(frames, params, intr)

    bounds = _bounds_of((cloud for clouds in view_clouds.values() for cloud in clouds), cfg)

    return {
        (theta, beta): _motion_maps(clouds, bounds, scales, weights, cfg, sequence.height, sequence.width,
                                    theta, beta)
        for (theta, beta), clouds in view_clouds.items()
    }

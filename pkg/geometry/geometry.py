import numpy as np
from core_data_modules.logging import Logger

from geometry.data_models import PointCloud

log = Logger(__name__)


class DimensionMismatchError(ValueError):
    pass


class NoForegroundError(ValueError):
    pass


def depth_to_cloud(frame, intr):
    """
    Back-projects the valid (non-zero) pixels of a depth frame to a point cloud, using a pinhole camera model.

    A pixel at column u and row v with depth Z becomes the point X = (u - cx)·Z/f, Y = (cy - v)·Z/f, Z.

    :param frame: Depth frame of shape (height, width), in millimeters.
    :type frame: numpy.ndarray
    :param intr: Camera intrinsics. Must match the frame's dimensions.
    :type intr: geometry.data_models.Intrinsics
    :rtype: geometry.data_models.PointCloud
    """
    frame = np.asarray(frame)
    if frame.shape != (intr.height, intr.width):
        raise DimensionMismatchError(
            f"Frame has shape {frame.shape} but the intrinsics are for {intr.height}x{intr.width} frames")

    pixel_indices = np.flatnonzero(frame)
    v, u = np.divmod(pixel_indices, intr.width)
    z = frame.reshape(-1)[pixel_indices].astype(np.float64)

    x = (u - intr.cx) * z / intr.focal_length
    y = (intr.cy - v) * z / intr.focal_length

    return PointCloud(np.stack([x, y, z], axis=1), pixel_indices)


def rotation_matrix(params):
    """
    Builds the 4x4 homogeneous transform that moves a virtual camera about a pivot at depth Z_c.

    The transform is the product of a rotation by theta in the Y-Z plane and a rotation by beta in the X-Z plane, each
    with a translation that keeps the pivot (0, 0, Z_c) fixed.

    :param params: Rotation angles and pivot depth.
    :type params: geometry.data_models.RotationParams
    :rtype: numpy.ndarray
    """
    theta = np.deg2rad(params.theta)
    beta = np.deg2rad(params.beta)
    z_c = params.pivot_depth

    cos_t, sin_t = np.cos(theta), np.sin(theta)
    cos_b, sin_b = np.cos(beta), np.sin(beta)

    r_theta = np.array([
        [1, 0, 0, 0],
        [0, cos_t, -sin_t, z_c * sin_t],
        [0, sin_t, cos_t, z_c * (1 - cos_t)],
        [0, 0, 0, 1]
    ], dtype=np.float64)
    r_beta = np.array([
        [cos_b, 0, sin_b, -z_c * sin_b],
        [0, 1, 0, 0],
        [-sin_b, 0, cos_b, z_c * (1 - cos_b)],
        [0, 0, 0, 1]
    ], dtype=np.float64)

    return r_theta @ r_beta


def rotate_cloud(cloud, params):
    """
    Rotates a point cloud as if the camera had moved around the subject.

    :param cloud: Cloud to rotate.
    :type cloud: geometry.data_models.PointCloud
    :param params: Rotation angles and pivot depth.
    :type params: geometry.data_models.RotationParams
    :return: Rotated cloud. Points are in the same order as the input.
    :rtype: geometry.data_models.PointCloud
    """
    if params.is_identity():
        return PointCloud(cloud.points.copy(), cloud.pixel_indices)

    transform = rotation_matrix(params)
    rotated = cloud.points @ transform[:3, :3].T + transform[:3, 3]
    return PointCloud(rotated, cloud.pixel_indices)


def cloud_to_depth(cloud, intr):
    """
    Projects a point cloud back to a depth frame in screen coordinates.

    A point (X, Y, Z) lands on column u = f·X/Z + cx and row v = cy - f·Y/Z, rounded to the nearest pixel. Where
    several points land on one pixel the nearest (smallest Z) is kept. Points behind the camera or outside the frame
    are dropped. Pixels no point lands on are 0.

    :param cloud: Cloud to project.
    :type cloud: geometry.data_models.PointCloud
    :param intr: Camera intrinsics of the output frame.
    :type intr: geometry.data_models.Intrinsics
    :return: Depth frame of shape (height, width), with depths rounded to whole millimeters.
    :rtype: numpy.ndarray
    """
    points = cloud.points[cloud.points[:, 2] > 0]
    x, y, z = points[:, 0], points[:, 1], points[:, 2]

    u = np.rint(intr.focal_length * x / z + intr.cx).astype(np.int64)
    v = np.rint(intr.cy - intr.focal_length * y / z).astype(np.int64)
    in_frame = (u >= 0) & (u < intr.width) & (v >= 0) & (v < intr.height)
    if not np.all(in_frame):
        log.debug(f"Dropped {np.count_nonzero(~in_frame)} points that project outside the frame")

    z_buffer = np.full((intr.height, intr.width), np.inf)
    np.minimum.at(z_buffer, (v[in_frame], u[in_frame]), z[in_frame])
    z_buffer[np.isinf(z_buffer)] = 0

    return np.rint(z_buffer).astype(np.uint32)


def rotate_frame(frame, params, intr):
    """
    Renders a depth frame as seen by a camera rotated about the subject.

    :param frame: Depth frame of shape (height, width).
    :type frame: numpy.ndarray
    :param params: Rotation angles and pivot depth.
    :type params: geometry.data_models.RotationParams
    :param intr: Camera intrinsics.
    :type intr: geometry.data_models.Intrinsics
    :rtype: numpy.ndarray
    """
    return cloud_to_depth(rotate_cloud(depth_to_cloud(frame, intr), params), intr)


def rotation_grid(grid):
    """
    :param grid: Rotation grid.
    :type grid: geometry.data_models.RotationGrid
    :return: Every (theta, beta) pair of the grid, theta-major.
    :rtype: list of (float, float)
    """
    return [(theta, beta) for theta in grid.theta_grid.values() for beta in grid.beta_grid.values()]


def resolve_pivot_depth(frames, intr):
    """
    Chooses the rotation pivot for a sequence as the median depth of the first frame with any foreground.

    :param frames: Segmented depth frames of shape (N, height, width).
    :type frames: numpy.ndarray
    :param intr: Camera intrinsics.
    :type intr: geometry.data_models.Intrinsics
    :return: Pivot depth, in millimeters.
    :rtype: float
    """
    for frame in frames:
        cloud = depth_to_cloud(frame, intr)
        if len(cloud) > 0:
            return float(np.median(cloud.points[:, 2]))
    raise NoForegroundError("Cannot choose a rotation pivot for a sequence with no foreground pixels")

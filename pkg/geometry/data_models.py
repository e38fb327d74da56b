import math

import numpy as np

DEFAULT_FOCAL_LENGTH = 580.0


class AngleGridError(ValueError):
    pass


class Intrinsics(object):
    def __init__(self, focal_length, cx, cy, width, height):
        """
        Pinhole camera parameters of a depth sensor.

        :param focal_length: Focal length, in pixels. Must be > 0.
        :type focal_length: float
        :param cx: Column of the principal point, in pixels.
        :type cx: float
        :param cy: Row of the principal point, in pixels.
        :type cy: float
        :param width: Image width, in pixels.
        :type width: int
        :param height: Image height, in pixels.
        :type height: int
        """
        if not focal_length > 0:
            raise ValueError(f"focal_length must be > 0, got {focal_length}")
        if not 0 <= cx < width:
            raise ValueError(f"cx must be in [0, {width}), got {cx}")
        if not 0 <= cy < height:
            raise ValueError(f"cy must be in [0, {height}), got {cy}")

        self.focal_length = float(focal_length)
        self.cx = float(cx)
        self.cy = float(cy)
        self.width = int(width)
        self.height = int(height)

    @classmethod
    def default_for(cls, width, height, focal_length=DEFAULT_FOCAL_LENGTH, cx=None, cy=None):
        """
        Creates intrinsics for an image of the given size, with the principal point at the image centre unless given.
        """
        return cls(
            focal_length,
            width / 2 if cx is None else cx,
            height / 2 if cy is None else cy,
            width, height
        )


class PointCloud(object):
    def __init__(self, points, pixel_indices=None):
        """
        :param points: Array of shape (M, 3) of (X, Y, Z) coordinates in millimeters. X points camera-right, Y points
                       camera-up and Z is the depth along the optical axis.
        :type points: numpy.ndarray
        :param pixel_indices: Row-major index of the source pixel of each point, or None if the points don't come
                              from a depth frame.
        :type pixel_indices: numpy.ndarray | None
        """
        points = np.asarray(points, dtype=np.float64).reshape((-1, 3))
        if pixel_indices is not None:
            pixel_indices = np.asarray(pixel_indices, dtype=np.int64)
            assert pixel_indices.shape == (points.shape[0],), \
                f"Expected {points.shape[0]} pixel indices, got {pixel_indices.shape}"

        self.points = points
        self.pixel_indices = pixel_indices

    def __len__(self):
        return self.points.shape[0]


class RotationParams(object):
    def __init__(self, theta, beta, pivot_depth):
        """
        A virtual camera rotation about the subject.

        :param theta: First rotation angle, in degrees.
        :type theta: float
        :param beta: Second rotation angle, in degrees.
        :type beta: float
        :param pivot_depth: Depth Z_c of the rotation pivot, in millimeters. Must be > 0.
        :type pivot_depth: float
        """
        if not pivot_depth > 0:
            raise ValueError(f"pivot_depth must be > 0, got {pivot_depth}")

        self.theta = float(theta)
        self.beta = float(beta)
        self.pivot_depth = float(pivot_depth)

    def is_identity(self):
        return self.theta == 0 and self.beta == 0


class AngleGrid(object):
    def __init__(self, start, step, stop):
        """
        A finite arithmetic progression of angles `start, start + step, ..., stop`, in degrees.

        :param start: First angle.
        :type start: float
        :param step: Increment between angles. Must be > 0 unless start == stop.
        :type step: float
        :param stop: Last angle. Must be reachable from `start` in a whole number of steps.
        :type stop: float
        """
        if start != stop:
            if not step > 0:
                raise AngleGridError(f"Angle grid step must be > 0, got {step}")
            steps = (stop - start) / step
            if steps < 0 or not math.isclose(steps, round(steps), abs_tol=1e-9):
                raise AngleGridError(f"Angle grid {start}:{step}:{stop} does not end at {stop}")

        self.start = float(start)
        self.step = float(step)
        self.stop = float(stop)

    @classmethod
    def parse(cls, text):
        """
        Parses an angle grid written as `start:step:stop`, e.g. "-30:15:30". A single number is a one-angle grid.
        """
        fields = text.strip().split(":")
        try:
            values = [float(field) for field in fields]
        except ValueError:
            raise AngleGridError(f"Angle grid '{text}' is not of the form start:step:stop")
        if len(values) == 1:
            return cls(values[0], 1, values[0])
        if len(values) != 3:
            raise AngleGridError(f"Angle grid '{text}' is not of the form start:step:stop")
        return cls(*values)

    def values(self):
        if self.start == self.stop:
            return [self.start]
        count = int(round((self.stop - self.start) / self.step))
        return [self.start + i * self.step for i in range(count)] + [self.stop]

    def __str__(self):
        return f"{self.start:g}:{self.step:g}:{self.stop:g}"


class RotationGrid(object):
    def __init__(self, theta_grid, beta_grid, pivot_depth=None):
        """
        The set of virtual camera rotations used to augment a dataset.

        :param theta_grid: Grid of theta angles.
        :type theta_grid: AngleGrid
        :param beta_grid: Grid of beta angles.
        :type beta_grid: AngleGrid
        :param pivot_depth: Depth of the rotation pivot in millimeters, or None to use the median depth of the first
                            frame's foreground in each sequence.
        :type pivot_depth: float | None
        """
        if pivot_depth is not None and not pivot_depth > 0:
            raise ValueError(f"pivot_depth must be > 0, got {pivot_depth}")

        self.theta_grid = theta_grid
        self.beta_grid = beta_grid
        self.pivot_depth = pivot_depth

    @classmethod
    def default(cls):
        return cls(AngleGrid(-30, 15, 30), AngleGrid(-5, 5, 5))

    @classmethod
    def none(cls):
        """
        The grid of only the unrotated view.
        """
        return cls(AngleGrid(0, 1, 0), AngleGrid(0, 1, 0))

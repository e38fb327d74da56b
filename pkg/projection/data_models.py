import numpy as np


class ViewPlanes(object):
    FRONT = "f"  # X-Y plane, holding depth Z.
    SIDE = "s"   # Z-Y plane, holding X.
    TOP = "t"    # X-Z plane, holding Y.

    VALUES = [FRONT, SIDE, TOP]


class ProjectionBounds(object):
    def __init__(self, lower, upper):
        """
        Axis-aligned box that projections are binned within.

        :param lower: (X, Y, Z) lower corner, in millimeters.
        :type lower: iterable of float
        :param upper: (X, Y, Z) upper corner, in millimeters. Must be strictly greater than `lower` on every axis.
        :type upper: iterable of float
        """
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        assert lower.shape == (3,) and upper.shape == (3,)
        if not np.all(upper > lower):
            raise ValueError(f"Degenerate projection bounds {lower.tolist()} - {upper.tolist()}")

        self.lower = lower
        self.upper = upper

    @property
    def extent(self):
        return self.upper - self.lower

    def contains(self, points):
        """
        :param points: Array of shape (M, 3).
        :type points: numpy.ndarray
        :return: Boolean mask of the points inside these bounds, edges included.
        :rtype: numpy.ndarray
        """
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)


class ProjectedMap(object):
    def __init__(self, plane, grid, row_bin_size, col_bin_size, value_bin_size=1.0, dropped_points=0):
        """
        One depth frame projected onto one view plane.

        :param plane: One of `ViewPlanes.VALUES`.
        :type plane: str
        :param grid: Non-negative map of shape (rows, cols). 0 marks cells no point projected to.
        :type grid: numpy.ndarray
        :param row_bin_size: Millimeters per row.
        :type row_bin_size: float
        :param col_bin_size: Millimeters per column.
        :type col_bin_size: float
        :param value_bin_size: Millimeters per unit of the stored values.
        :type value_bin_size: float
        :param dropped_points: Number of points that fell outside the projection bounds.
        :type dropped_points: int
        """
        assert plane in ViewPlanes.VALUES, plane
        assert grid.ndim == 2 and grid.size > 0, f"Projected maps must be non-empty 2D grids, got {grid.shape}"

        self.plane = plane
        self.grid = grid
        self.row_bin_size = row_bin_size
        self.col_bin_size = col_bin_size
        self.value_bin_size = value_bin_size
        self.dropped_points = dropped_points

    @property
    def shape(self):
        return self.grid.shape

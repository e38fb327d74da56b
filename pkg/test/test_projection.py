import numpy as np
import pytest

from geometry import PointCloud
from projection import ViewPlanes, ProjectionBounds, segment_foreground, compute_bounds, grid_shape, project


def _oracle_project(points, plane, bounds, shape):
    """Cell-by-cell reference projection."""
    rows, cols = shape
    row_axis, col_axis, value_axis = {"f": (1, 0, 2), "s": (1, 2, 0), "t": (2, 0, 1)}[plane]
    grid = np.zeros(shape)
    filled = np.zeros(shape, dtype=bool)
    for point in points:
        if np.any(point < bounds.lower) or np.any(point > bounds.upper):
            continue
        lo, hi = bounds.lower, bounds.upper
        row = min(int(np.floor((point[row_axis] - lo[row_axis]) / (hi[row_axis] - lo[row_axis]) * rows)), rows - 1)
        if row_axis == 1:
            row = rows - 1 - row
        col = min(int(np.floor((point[col_axis] - lo[col_axis]) / (hi[col_axis] - lo[col_axis]) * cols)), cols - 1)
        value = point[value_axis] - lo[value_axis]
        if not filled[row, col] or value < grid[row, col]:
            grid[row, col] = value
            filled[row, col] = True
    return grid


def test_segment_foreground():
    frame = np.array([[100, 500, 2000], [4500, 4501, 0]], dtype=np.uint32)
    assert segment_foreground(frame, 500, 4500).tolist() == [[0, 500, 2000], [4500, 0, 0]]
    with pytest.raises(ValueError):
        segment_foreground(frame, 10, 5)


class TestBounds(object):
    def test_expansion_is_split_between_both_sides(self):
        cloud = PointCloud([[0, 0, 1000], [100, 200, 3000]])
        bounds = compute_bounds([cloud], expansion=0.1)
        np.testing.assert_allclose(bounds.lower, [-5, -10, 900])
        np.testing.assert_allclose(bounds.upper, [105, 210, 3100])

    def test_minimum_padding_is_1mm(self):
        cloud = PointCloud([[0, 0, 1000], [0, 0, 1000]])
        bounds = compute_bounds([cloud], expansion=0.05)
        np.testing.assert_allclose(bounds.lower, [-1, -1, 999])
        np.testing.assert_allclose(bounds.upper, [1, 1, 1001])

    def test_encloses_every_cloud(self):
        bounds = compute_bounds([PointCloud([[0, 0, 1000]]), PointCloud(np.zeros((0, 3))),
                                 PointCloud([[50, -20, 1500]])], expansion=0)
        assert bounds.contains(np.array([[0, 0, 1000], [50, -20, 1500], [25, -10, 1200]])).all()

    def test_no_points(self):
        with pytest.raises(ValueError):
            compute_bounds([PointCloud(np.zeros((0, 3)))])


def test_grid_shapes():
    assert grid_shape(ViewPlanes.FRONT, 240, 320, 100) == (240, 320)
    assert grid_shape(ViewPlanes.SIDE, 240, 320, 100) == (240, 100)
    assert grid_shape(ViewPlanes.TOP, 240, 320, 100) == (100, 320)


class TestProject(object):
    def test_matches_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            points = rng.uniform([-300, -300, 1000], [300, 300, 2000], size=(200, 3))
            bounds = compute_bounds([PointCloud(points)], 0.05)
            for plane in ViewPlanes.VALUES:
                shape = grid_shape(plane, 12, 16, 10)
                projected = project(PointCloud(points), plane, bounds, shape)
                np.testing.assert_allclose(projected.grid, _oracle_project(points, plane, bounds, shape))

    def test_values_are_offsets_from_the_lower_bound(self):
        bounds = ProjectionBounds([0, 0, 1000], [10, 10, 2000])
        cloud = PointCloud([[2.5, 3.5, 1450]])

        front = project(cloud, ViewPlanes.FRONT, bounds, (10, 10))
        side = project(cloud, ViewPlanes.SIDE, bounds, (10, 10))
        top = project(cloud, ViewPlanes.TOP, bounds, (10, 10))

        assert front.grid[6, 2] == 450
        assert side.grid[6, 4] == 2.5
        assert top.grid[4, 2] == 3.5

    def test_collisions_keep_the_minimum(self):
        bounds = ProjectionBounds([0, 0, 1000], [10, 10, 2000])
        cloud = PointCloud([[5.5, 5.5, 1800], [5.5, 5.5, 1200], [5.5, 5.5, 1500]])
        grid = project(cloud, ViewPlanes.FRONT, bounds, (10, 10)).grid
        assert grid[4, 5] == 200
        assert np.count_nonzero(grid) == 1

    def test_out_of_bounds_points_are_dropped_and_counted(self):
        bounds = ProjectionBounds([0, 0, 1000], [10, 10, 2000])
        cloud = PointCloud([[5, 5, 1500], [50, 5, 1500], [5, 5, 500]])
        projected = project(cloud, ViewPlanes.FRONT, bounds, (4, 4))
        assert projected.dropped_points == 2
        assert np.count_nonzero(projected.grid) == 1

    def test_properties(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            points = rng.uniform([-300, -300, 1000], [300, 300, 2000], size=(100, 3))
            bounds = compute_bounds([PointCloud(points)], 0.05)
            permuted = points[rng.permutation(len(points))]
            for plane in ViewPlanes.VALUES:
                shape = grid_shape(plane, 8, 8, 8)
                grid = project(PointCloud(points), plane, bounds, shape).grid

                assert grid.min() >= 0
                assert np.count_nonzero(grid) <= len(points)
                np.testing.assert_array_equal(grid, project(PointCloud(permuted), plane, bounds, shape).grid)

    def test_bin_sizes(self):
        bounds = ProjectionBounds([0, 0, 1000], [40, 30, 2000])
        projected = project(PointCloud([[1, 1, 1001]]), ViewPlanes.SIDE, bounds, (10, 20))
        assert (projected.row_bin_size, projected.col_bin_size, projected.value_bin_size) == (3, 50, 1)

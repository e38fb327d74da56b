from geometry.data_models import Intrinsics, PointCloud, RotationParams, AngleGrid, RotationGrid, AngleGridError
from geometry.geometry import (depth_to_cloud, rotation_matrix, rotate_cloud, cloud_to_depth, rotate_frame,
                               rotation_grid, resolve_pivot_depth, DimensionMismatchError, NoForegroundError)

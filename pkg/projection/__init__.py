from projection.data_models import ViewPlanes, ProjectionBounds, ProjectedMap
from projection.projection import segment_foreground, compute_bounds, grid_shape, project

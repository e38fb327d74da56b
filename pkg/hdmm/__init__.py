from hdmm.data_models import WeightParams, ExtractionConfig, MotionMap, validate_scale
from hdmm.hdmm import (subsample_indices, accumulate, accumulate_weighted, extract_hdmm, extract_hdmm_grid,
                       ExtractionError, EmptyScaleError, MapDimensionMismatchError)

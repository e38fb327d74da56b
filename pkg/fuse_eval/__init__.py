from fuse_eval.data_models import SampleResult, EvalReport
from fuse_eval.fusion import fuse_scales, fuse_planes, FusionError
from fuse_eval.evaluation import (score_motion_maps, predict_sample, build_report, evaluate, write_report,
                                  write_confusion_matrix_csv)

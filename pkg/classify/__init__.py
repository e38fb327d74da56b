from classify.data_models import TrainConfig, SoftmaxRegressionModel
from classify.softmax_regression import (featurize, softmax, loss_and_gradient, train, predict, train_plane_models,
                                         MissingClassError, FeatureDimensionMismatchError, NumericDivergenceError)
from classify.model_io import (serialize_model, deserialize_model, read_model_header, write_model, read_model,
                               ModelFormatError, MODEL_MAGIC, MODEL_FORMAT_VERSION)

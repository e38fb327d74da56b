import os
import struct

import numpy as np
from core_data_modules.logging import Logger

from classify.data_models import SoftmaxRegressionModel

log = Logger(__name__)

MODEL_MAGIC = b"HDMM"
MODEL_FORMAT_VERSION = 1

# magic, version, class count, feature dimension
_HEADER = struct.Struct("<4sIII")


class ModelFormatError(ValueError):
    pass


def serialize_model(model):
    """
    Serializes a model's parameters as a header followed by the little-endian float64 weights, row-major, then the
    bias.

    :type model: classify.data_models.SoftmaxRegressionModel
    :rtype: bytes
    """
    header = _HEADER.pack(MODEL_MAGIC, MODEL_FORMAT_VERSION, model.class_count, model.feature_dimension)
    return header + model.weights.astype("<f8").tobytes(order="C") + model.bias.astype("<f8").tobytes()


def read_model_header(blob):
    """
    :return: (class count, feature dimension) of a serialized model.
    :rtype: (int, int)
    """
    if len(blob) < _HEADER.size:
        raise ModelFormatError(f"Model blob of {len(blob)} bytes is shorter than its {_HEADER.size} byte header")

    magic, version, class_count, feature_dimension = _HEADER.unpack_from(blob)
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"Model blob starts with {magic!r}, not {MODEL_MAGIC!r}")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"Unsupported model format version {version}")
    if class_count < 1:
        raise ModelFormatError("Model blob has no classes")

    expected_size = _HEADER.size + 8 * class_count * (feature_dimension + 1)
    if len(blob) != expected_size:
        raise ModelFormatError(
            f"A {class_count}x{feature_dimension} model blob should be {expected_size} bytes, got {len(blob)}")
    return class_count, feature_dimension


def deserialize_model(blob):
    """
    Inverse of `serialize_model`.

    :type blob: bytes
    :rtype: classify.data_models.SoftmaxRegressionModel
    """
    class_count, feature_dimension = read_model_header(blob)
    parameters = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    weights = parameters[:class_count * feature_dimension].reshape((class_count, feature_dimension))
    return SoftmaxRegressionModel(weights, parameters[class_count * feature_dimension:])


def write_model(model, path):
    parent = os.path.dirname(path)
    if parent != "":
        os.makedirs(parent, exist_ok=True)
    with open(path, "wb") as f:
        f.write(serialize_model(model))
    log.info(f"Wrote a {model.class_count}x{model.feature_dimension} model to '{path}'")


def read_model(path):
    with open(path, "rb") as f:
        return deserialize_model(f.read())

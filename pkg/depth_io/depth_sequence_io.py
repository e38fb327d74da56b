import os
import struct

import numpy as np
from core_data_modules.logging import Logger

from depth_io.data_models import DepthSequence, InvalidDepthSequenceError

log = Logger(__name__)

# Header: frame count N, width, height, as little-endian uint32s. Followed by N row-major frames of uint32 depths.
_HEADER = struct.Struct("<III")
_DEPTH_DTYPE = np.dtype("<u4")


class DepthFileError(ValueError):
    pass


class TruncatedDepthFileError(DepthFileError):
    pass


class DepthFileSizeMismatchError(DepthFileError):
    pass


class EmptyDepthSequenceError(DepthFileError):
    pass


def _parse_header(path, file_size, header_bytes):
    if len(header_bytes) < _HEADER.size:
        raise TruncatedDepthFileError(
            f"Depth file '{path}' is {file_size} bytes, too short for the {_HEADER.size}-byte header")

    frame_count, width, height = _HEADER.unpack(header_bytes[:_HEADER.size])
    if frame_count == 0:
        raise EmptyDepthSequenceError(f"Depth file '{path}' declares 0 frames")
    if width == 0 or height == 0:
        raise DepthFileSizeMismatchError(f"Depth file '{path}' declares empty frames ({width}x{height})")

    return frame_count, width, height


def read_sequence_header(path):
    """
    Reads the header of a depth file, without loading its frames.

    :param path: Path to the depth file.
    :type path: str
    :return: Tuple of (frame count, width, height, file size in bytes).
    :rtype: (int, int, int, int)
    """
    file_size = os.path.getsize(path)
    with open(path, "rb") as f:
        header_bytes = f.read(_HEADER.size)
    frame_count, width, height = _parse_header(path, file_size, header_bytes)
    return frame_count, width, height, file_size


def read_sequence(path):
    """
    Reads a depth sequence from a binary depth file.

    :param path: Path to the depth file to read.
    :type path: str
    :return: Depth sequence, with values exactly as stored in the file.
    :rtype: depth_io.data_models.DepthSequence
    """
    with open(path, "rb") as f:
        data = f.read()

    frame_count, width, height = _parse_header(path, len(data), data)

    expected_size = _HEADER.size + frame_count * width * height * _DEPTH_DTYPE.itemsize
    if len(data) < expected_size:
        raise TruncatedDepthFileError(
            f"Depth file '{path}' is truncated: header declares {frame_count} frames of {width}x{height} "
            f"({expected_size} bytes) but the file is {len(data)} bytes")
    if len(data) > expected_size:
        raise DepthFileSizeMismatchError(
            f"Depth file '{path}' has {len(data) - expected_size} bytes after the {frame_count} frames its header "
            f"declares")

    frames = np.frombuffer(data, dtype=_DEPTH_DTYPE, offset=_HEADER.size).reshape((frame_count, height, width))
    log.debug(f"Read {frame_count} frames of {width}x{height} from '{path}'")

    return DepthSequence(frames)


def write_sequence(seq, path):
    """
    Writes a depth sequence to a binary depth file, creating the parent directories if needed.

    :param seq: Sequence to write.
    :type seq: depth_io.data_models.DepthSequence
    :param path: Path to write to.
    :type path: str
    """
    if not isinstance(seq, DepthSequence):
        # Validates the frames, rejecting empty frame lists before anything is written.
        seq = DepthSequence(seq)
    if seq.frame_count < 1:
        raise InvalidDepthSequenceError("Refusing to write a depth sequence with no frames")

    header = _HEADER.pack(seq.frame_count, seq.width, seq.height)
    payload = seq.frames.astype(_DEPTH_DTYPE).tobytes(order="C")

    try:
        parent_dir = os.path.dirname(path)
        if parent_dir != "":
            os.makedirs(parent_dir, exist_ok=True)
        with open(path, "wb") as f:
            f.write(header)
            f.write(payload)
    except OSError as ex:
        raise DepthFileError(f"Could not write depth file '{path}': {ex}") from ex

    log.debug(f"Wrote {seq.frame_count} frames of {seq.width}x{seq.height} to '{path}'")

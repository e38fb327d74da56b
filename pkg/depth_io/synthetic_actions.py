import os

import numpy as np
from core_data_modules.logging import Logger

from depth_io.data_models import DepthSequence, SampleId
from depth_io.depth_sequence_io import write_sequence
from depth_io.sample_ids import format_sample_id

log = Logger(__name__)


class SyntheticActions(object):
    TRANSLATE_UP = 1     # A blob in front of the body moves upwards.
    TRANSLATE_RIGHT = 2  # A blob in front of the body moves to the right.
    EXPAND = 3           # A blob in front of the body grows.

    VALUES = [TRANSLATE_UP, TRANSLATE_RIGHT, EXPAND]


_BODY_DEPTH_MM = 2200
_BLOB_DEPTH_MM = 1600


def _disc_mask(size, centre_row, centre_col, radius):
    rows, cols = np.mgrid[0:size, 0:size]
    return (rows - centre_row) ** 2 + (cols - centre_col) ** 2 <= radius ** 2


def generate_sequence(action_id, rng, frame_count=16, size=32):
    """
    Generates a depth sequence of a static body with a moving blob held in front of it.

    :param action_id: One of `SyntheticActions.VALUES`.
    :type action_id: int
    :param rng: Random generator used to jitter the body and blob positions and depths.
    :type rng: numpy.random.Generator
    :param frame_count: Number of frames to generate.
    :type frame_count: int
    :param size: Width and height of the frames, in pixels.
    :type size: int
    :rtype: depth_io.data_models.DepthSequence
    """
    assert action_id in SyntheticActions.VALUES, action_id

    scale = size / 32
    body_depth = _BODY_DEPTH_MM + int(rng.integers(-50, 51))
    blob_depth = _BLOB_DEPTH_MM + int(rng.integers(-50, 51))
    body_top, body_left = (int(v) for v in rng.integers(-1, 2, size=2))
    jitter_row, jitter_col = rng.uniform(-2, 2, size=2) * scale

    frames = np.zeros((frame_count, size, size), dtype=np.uint32)
    travel = (size - 17 * scale) / max(frame_count - 1, 1)
    for i in range(frame_count):
        frame = frames[i]
        frame[int(3 * scale) + body_top:int(29 * scale) + body_top,
              int(5 * scale) + body_left:int(27 * scale) + body_left] = body_depth

        centre_row = size / 2 + jitter_row
        centre_col = size / 2 + jitter_col
        radius = 4 * scale
        if action_id == SyntheticActions.TRANSLATE_UP:
            centre_row = size - 9 * scale + jitter_row - i * travel
        elif action_id == SyntheticActions.TRANSLATE_RIGHT:
            centre_col = 8 * scale + jitter_col + i * travel
        else:
            radius = (2 + 7.5 * i / max(frame_count - 1, 1)) * scale

        frame[_disc_mask(size, centre_row, centre_col, radius)] = blob_depth

    return DepthSequence(frames)


def generate_synthetic_dataset(root, sequences_per_class=20, subject_count=10, frame_count=16, size=32, seed=0):
    """
    Writes a synthetic dataset of `SyntheticActions` to `root`, using the `axxx_sxxx_exxx_depth.bin` naming convention.

    Each subject performs each action `sequences_per_class / subject_count` times.

    :param root: Directory to write the depth files to.
    :type root: str
    :param sequences_per_class: Number of sequences to generate per action. Must be a multiple of `subject_count`.
    :type sequences_per_class: int
    :param subject_count: Number of subjects.
    :type subject_count: int
    :param frame_count: Number of frames per sequence.
    :type frame_count: int
    :param size: Width and height of the frames, in pixels.
    :type size: int
    :param seed: Seed for the random generator.
    :type seed: int
    :return: Paths of the written files.
    :rtype: list of str
    """
    assert sequences_per_class % subject_count == 0, \
        f"sequences_per_class ({sequences_per_class}) must be a multiple of subject_count ({subject_count})"
    examples_per_subject = sequences_per_class // subject_count

    rng = np.random.default_rng(seed)
    paths = []
    for action_id in SyntheticActions.VALUES:
        for subject_id in range(1, subject_count + 1):
            for example_id in range(1, examples_per_subject + 1):
                sample_id = SampleId(action_id, subject_id, example_id)
                path = os.path.join(root, format_sample_id(sample_id))
                write_sequence(generate_sequence(action_id, rng, frame_count, size), path)
                paths.append(path)

    log.info(f"Generated {len(paths)} synthetic depth sequences in '{root}'")
    return paths

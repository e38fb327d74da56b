import os
import re

from depth_io.data_models import SampleId

DEPTH_FILE_SUFFIX = "_depth.bin"

# (prefix, description) of each segment of a file name, in the order they appear.
_SEGMENTS = [("a", "action"), ("s", "subject"), ("e", "example")]


class SampleIdParseError(ValueError):
    def __init__(self, file_name, segment, reason):
        """
        :param file_name: File name that failed to parse.
        :type file_name: str
        :param segment: The offending segment of the file name.
        :type segment: str
        :param reason: Description of what is wrong with the segment.
        :type reason: str
        """
        super().__init__(f"Cannot parse sample id from '{file_name}': segment '{segment}' {reason}")
        self.file_name = file_name
        self.segment = segment


def is_depth_file_name(file_name):
    return os.path.basename(file_name).endswith(DEPTH_FILE_SUFFIX)


def parse_sample_id(file_name):
    """
    Parses a sample id from a file name of the form `axxx_sxxx_exxx_depth.bin`, where each `xxx` is a three-digit,
    zero-padded id.

    :param file_name: File name to parse. Any leading directories are ignored.
    :type file_name: str
    :return: The parsed sample id.
    :rtype: depth_io.data_models.SampleId
    """
    base_name = os.path.basename(file_name)
    if not base_name.endswith(DEPTH_FILE_SUFFIX):
        raise SampleIdParseError(base_name, base_name, f"does not end with '{DEPTH_FILE_SUFFIX}'")

    segments = base_name[:-len(DEPTH_FILE_SUFFIX)].split("_")

    ids = []
    for i, (prefix, description) in enumerate(_SEGMENTS):
        if i >= len(segments):
            raise SampleIdParseError(base_name, f"{prefix}xxx", f"is missing (expected the {description} id)")
        segment = segments[i]
        match = re.fullmatch(f"{prefix}([0-9]{{3}})", segment)
        if match is None:
            raise SampleIdParseError(
                base_name, segment, f"is not a valid {description} id ('{prefix}' followed by exactly 3 digits)")
        value = int(match.group(1))
        if value == 0:
            raise SampleIdParseError(base_name, segment, f"has {description} id 0, but ids start at 1")
        ids.append(value)

    if len(segments) > len(_SEGMENTS):
        raise SampleIdParseError(base_name, segments[len(_SEGMENTS)], "is unexpected")

    return SampleId(*ids)


def format_sample_id(sample_id):
    """
    Formats a sample id as a depth file name, the inverse of `parse_sample_id`.

    :param sample_id: Sample id to format.
    :type sample_id: depth_io.data_models.SampleId
    :return: File name of the form `axxx_sxxx_exxx_depth.bin`.
    :rtype: str
    """
    return f"{format_sample_id_stem(sample_id)}{DEPTH_FILE_SUFFIX}"


def format_sample_id_stem(sample_id):
    for value in sample_id.as_tuple():
        if value > 999:
            raise ValueError(f"{sample_id} has an id that can't be written with 3 digits")
    return f"a{sample_id.action_id:03d}_s{sample_id.subject_id:03d}_e{sample_id.example_id:03d}"

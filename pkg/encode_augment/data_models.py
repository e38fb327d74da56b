import re

import numpy as np

from depth_io.data_models import SampleId
from depth_io.dataset_manifest import ROOT_SOURCE_TAG
from depth_io.sample_ids import format_sample_id_stem
from projection.data_models import ViewPlanes

IMAGE_FILE_SUFFIX = ".png"

# Images of samples outside the dataset root are prefixed with "<source_tag>__".
_SOURCE_TAG_SEPARATOR = "__"
_IMAGE_FILE_NAME_PATTERN = re.compile(
    r"^(?:(.+)__)?a(\d{3})_s(\d{3})_e(\d{3})_([fst])_n(\d{2,})_th([+-]\d{2,})_be([+-]\d{2,})\.png$")


class ImageProvenanceParseError(ValueError):
    pass


class ImageProvenance(object):
    def __init__(self, sample_id, plane, scale, theta=0, beta=0, source_tag=ROOT_SOURCE_TAG):
        """
        Identifies where an encoded motion map image came from.

        :param sample_id: Sample the image was extracted from.
        :type sample_id: depth_io.data_models.SampleId
        :param plane: One of `ViewPlanes.VALUES`.
        :type plane: str
        :param scale: Temporal scale of the motion map.
        :type scale: int
        :param theta: Theta of the virtual camera rotation, in whole degrees.
        :type theta: int
        :param beta: Beta of the virtual camera rotation, in whole degrees.
        :type beta: int
        :param source_tag: Source tree of the sample, or "." for the dataset root.
        :type source_tag: str
        """
        assert plane in ViewPlanes.VALUES, plane
        assert source_tag != "" and "/" not in source_tag, f"Invalid source tag '{source_tag}'"
        if int(theta) != theta or int(beta) != beta:
            raise ValueError(f"Image provenance angles must be whole degrees, got theta={theta}, beta={beta}")

        self.sample_id = sample_id
        self.plane = plane
        self.scale = int(scale)
        self.theta = int(theta)
        self.beta = int(beta)
        self.source_tag = source_tag

    def file_name(self):
        """
        :return: File name of the form `a012_s005_e002_f_n01_th-30_be+05.png`, or
                 `msr__a012_s005_e002_f_n01_th-30_be+05.png` for a sample of source tree "msr".
        :rtype: str
        """
        prefix = "" if self.source_tag == ROOT_SOURCE_TAG else f"{self.source_tag}{_SOURCE_TAG_SEPARATOR}"
        return f"{prefix}{format_sample_id_stem(self.sample_id)}_{self.plane}_n{self.scale:02d}" \
               f"_th{self.theta:+03d}_be{self.beta:+03d}{IMAGE_FILE_SUFFIX}"

    @classmethod
    def from_file_name(cls, file_name):
        match = _IMAGE_FILE_NAME_PATTERN.match(file_name)
        if match is None:
            raise ImageProvenanceParseError(f"'{file_name}' is not an encoded motion map image file name")
        source_tag, action, subject, example, plane, scale, theta, beta = match.groups()
        return cls(SampleId(int(action), int(subject), int(example)), plane, int(scale), int(theta), int(beta),
                   ROOT_SOURCE_TAG if source_tag is None else source_tag)

    def to_dict(self):
        return {
            "source_tag": self.source_tag,
            "sample_id": self.sample_id.to_dict(),
            "plane": self.plane,
            "scale": self.scale,
            "theta": self.theta,
            "beta": self.beta
        }

    def __eq__(self, other):
        return isinstance(other, ImageProvenance) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return self.file_name()


class PseudoRgbImage(object):
    def __init__(self, pixels, provenance=None):
        """
        :param pixels: RGB image of shape (height, width, 3).
        :type pixels: numpy.ndarray of uint8
        :param provenance: Where the image came from, if known.
        :type provenance: ImageProvenance | None
        """
        assert pixels.ndim == 3 and pixels.shape[2] == 3, f"Expected an (H, W, 3) image, got {pixels.shape}"
        assert pixels.dtype == np.uint8, f"Expected uint8 pixels, got {pixels.dtype}"

        self.pixels = pixels
        self.provenance = provenance

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


class AugmentSpec(object):
    def __init__(self, crop_size=224, flip=True, jitter=10, seed=0, copies=1):
        """
        Training-time image augmentation settings.

        :param crop_size: Side of the square crop window, in pixels.
        :type crop_size: int
        :param flip: Whether to mirror images horizontally with probability 0.5.
        :type flip: bool
        :param jitter: Maximum absolute per-channel intensity offset.
        :type jitter: int
        :param seed: Seed of the augmentation random generator.
        :type seed: int
        :param copies: Number of augmented copies to produce per training image.
        :type copies: int
        """
        if crop_size < 1:
            raise ValueError(f"crop_size must be >= 1, got {crop_size}")
        if jitter < 0:
            raise ValueError(f"jitter must be >= 0, got {jitter}")
        if copies < 1:
            raise ValueError(f"copies must be >= 1, got {copies}")

        self.crop_size = int(crop_size)
        self.flip = bool(flip)
        self.jitter = int(jitter)
        self.seed = int(seed)
        self.copies = int(copies)

    def with_seed(self, seed):
        return AugmentSpec(self.crop_size, self.flip, self.jitter, seed, self.copies)

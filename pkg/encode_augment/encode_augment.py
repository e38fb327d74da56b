import hashlib
import math
import os

import cv2
import numpy as np
from core_data_modules.logging import Logger

from depth_io.dataset_manifest import ROOT_SOURCE_TAG
from depth_io.depth_sequence_io import read_sequence
from encode_augment.colormap import colormap
from encode_augment.data_models import PseudoRgbImage, ImageProvenance, ImageProvenanceParseError
from hdmm.data_models import WeightParams
from hdmm.hdmm import extract_hdmm_grid

log = Logger(__name__)


class EncodingError(ValueError):
    pass


def normalize(grid):
    """
    Min-max normalizes a map to [0, 1]. A constant map normalizes to all zeros.

    :type grid: numpy.ndarray
    :rtype: numpy.ndarray
    """
    grid = np.asarray(grid, dtype=np.float64)
    if not np.all(np.isfinite(grid)):
        raise EncodingError("Cannot encode a map with non-finite values")

    lo, hi = grid.min(), grid.max()
    if hi == lo:
        return np.zeros_like(grid)
    return (grid - lo) / (hi - lo)


def encode(motion_map, canvas_size, sample_id=None, source_tag=ROOT_SOURCE_TAG):
    """
    Encodes a motion map as a pseudo-RGB image of canvas_size x canvas_size pixels.

    :param motion_map: Map to encode.
    :type motion_map: hdmm.data_models.MotionMap
    :param canvas_size: Side of the output image, in pixels.
    :type canvas_size: int
    :param sample_id: Sample the map was extracted from. If given, the image carries an `ImageProvenance`.
    :type sample_id: depth_io.data_models.SampleId | None
    :param source_tag: Source tree of the sample, recorded in the provenance.
    :type source_tag: str
    :rtype: encode_augment.data_models.PseudoRgbImage
    """
    if canvas_size < 1:
        raise EncodingError(f"Canvas size must be >= 1, got {canvas_size}")
    if motion_map.grid.size == 0:
        raise EncodingError("Cannot encode an empty map")

    pixels = colormap(normalize(motion_map.grid))
    if pixels.shape[:2] != (canvas_size, canvas_size):
        pixels = cv2.resize(pixels, (canvas_size, canvas_size), interpolation=cv2.INTER_LINEAR)

    provenance = None
    if sample_id is not None:
        provenance = ImageProvenance(sample_id, motion_map.plane, motion_map.scale,
                                     motion_map.theta, motion_map.beta, source_tag)
    return PseudoRgbImage(pixels, provenance)


def _crop_offset_bounds(length, crop_size):
    # Offsets that keep the window inside the image with its centre in the middle half of the axis.
    lo = max(0, math.ceil(length / 4 - crop_size / 2))
    hi = min(length - crop_size, math.floor(3 * length / 4 - crop_size / 2))
    if lo > hi:
        lo = hi = (length - crop_size) // 2
    return lo, hi + 1


def augment(image, spec):
    """
    Randomly crops, flips and colour-jitters an image. The result depends only on the image and `spec`.

    Draws, in order: the crop column, the crop row, the flip, then the three channel offsets.

    :param image: Image to augment. Must be at least spec.crop_size pixels on each side.
    :type image: encode_augment.data_models.PseudoRgbImage
    :param spec: Augmentation settings, including the seed.
    :type spec: encode_augment.data_models.AugmentSpec
    :return: Image of crop_size x crop_size pixels.
    :rtype: encode_augment.data_models.PseudoRgbImage
    """
    size = spec.crop_size
    if image.height < size or image.width < size:
        raise EncodingError(f"Cannot crop {size}x{size} pixels from a {image.height}x{image.width} image")

    rng = np.random.default_rng(spec.seed)
    x0 = int(rng.integers(*_crop_offset_bounds(image.width, size)))
    y0 = int(rng.integers(*_crop_offset_bounds(image.height, size)))
    pixels = image.pixels[y0:y0 + size, x0:x0 + size]

    if rng.random() < 0.5 and spec.flip:
        pixels = pixels[:, ::-1]

    if spec.jitter > 0:
        offsets = rng.integers(-spec.jitter, spec.jitter + 1, size=3)
        pixels = np.clip(pixels.astype(np.int16) + offsets, 0, 255)

    return PseudoRgbImage(np.ascontiguousarray(pixels, dtype=np.uint8), image.provenance)


def center_crop(image, size):
    """
    Crops the centre size x size pixels of an image.

    :type image: encode_augment.data_models.PseudoRgbImage
    :type size: int
    :rtype: encode_augment.data_models.PseudoRgbImage
    """
    if image.height < size or image.width < size:
        raise EncodingError(f"Cannot crop {size}x{size} pixels from a {image.height}x{image.width} image")

    y0 = (image.height - size) // 2
    x0 = (image.width - size) // 2
    return PseudoRgbImage(np.ascontiguousarray(image.pixels[y0:y0 + size, x0:x0 + size]), image.provenance)


def derive_seed(seed, sample_id, theta, beta, scale, plane, copy=0, source_tag=ROOT_SOURCE_TAG):
    """
    Derives the augmentation seed of one training image from the run's seed and the image's provenance.

    :rtype: int
    """
    key = f"{seed}/{source_tag}/{sample_id.action_id}/{sample_id.subject_id}/{sample_id.example_id}/" \
          f"{float(theta)}/{float(beta)}/{scale}/{plane}/{copy}"
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "little")


def augmented_copies(image, spec):
    """
    Produces `spec.copies` augmentations of an image that carries provenance, each seeded by `derive_seed`.

    :type image: encode_augment.data_models.PseudoRgbImage
    :type spec: encode_augment.data_models.AugmentSpec
    :rtype: list of encode_augment.data_models.PseudoRgbImage
    """
    p = image.provenance
    assert p is not None, "Augmenting image copies requires image provenance"
    return [
        augment(image, spec.with_seed(
            derive_seed(spec.seed, p.sample_id, p.theta, p.beta, p.scale, p.plane, copy, p.source_tag)))
        for copy in range(spec.copies)
    ]


def write_image(image, path):
    """
    Writes an image to a PNG file, creating the parent directory if needed.

    :type image: encode_augment.data_models.PseudoRgbImage
    :type path: str
    """
    parent = os.path.dirname(path)
    if parent != "":
        os.makedirs(parent, exist_ok=True)
    if not cv2.imwrite(path, cv2.cvtColor(image.pixels, cv2.COLOR_RGB2BGR)):
        raise OSError(f"Failed to write image '{path}'")


def read_image(path):
    """
    Reads an RGB image from a file. If the file name follows the encoded image naming convention the image carries
    the provenance it names.

    :type path: str
    :rtype: encode_augment.data_models.PseudoRgbImage
    """
    pixels = cv2.imread(path, cv2.IMREAD_COLOR)
    if pixels is None:
        raise OSError(f"Failed to read image '{path}'")

    try:
        provenance = ImageProvenance.from_file_name(os.path.basename(path))
    except ImageProvenanceParseError:
        provenance = None
    return PseudoRgbImage(cv2.cvtColor(pixels, cv2.COLOR_BGR2RGB), provenance)


def encoded_views(entry, grid, scales, weights, cfg, canvas_size):
    """
    Reads the depth sequence of a manifest entry and encodes its motion maps under every rotation of `grid`.

    :type entry: depth_io.data_models.ManifestEntry
    :rtype: list of encode_augment.data_models.PseudoRgbImage
    """
    sequence = read_sequence(entry.path)
    views = extract_hdmm_grid(sequence, grid, scales, weights, cfg)
    return [encode(motion_map, canvas_size, entry.sample_id, entry.source_tag)
            for motion_maps in views.values() for motion_map in motion_maps]


def enumerate_training_set(manifest, grid, scales, spec, cfg, weights=WeightParams(), canvas_size=256,
                           failures=None):
    """
    Streams the augmented training images of every sample of a manifest.

    Samples that cannot be read or extracted are logged, appended to `failures` if given, and skipped.

    :param manifest: Training manifest.
    :type manifest: depth_io.data_models.DatasetManifest
    :param grid: Rotations to augment each sample with.
    :type grid: geometry.data_models.RotationGrid
    :param scales: Temporal scales.
    :type scales: list of int
    :param spec: Augmentation settings.
    :type spec: encode_augment.data_models.AugmentSpec
    :param cfg: Extraction settings.
    :type cfg: hdmm.data_models.ExtractionConfig
    :param weights: Weights for weighted accumulation, or None to sum the differences.
    :type weights: hdmm.data_models.WeightParams | None
    :param canvas_size: Side of the encoded images before augmentation, in pixels.
    :type canvas_size: int
    :param failures: List to append a (SampleId, error message) tuple to for each skipped sample.
    :type failures: list | None
    :return: Generator of (image, label, plane).
    :rtype: generator of (encode_augment.data_models.PseudoRgbImage, int, str)
    """
    for entry in manifest:
        try:
            images = encoded_views(entry, grid, scales, weights, cfg, canvas_size)
        except (ValueError, OSError) as e:
            log.warning(f"Skipping sample {entry.sample_id}: {e}")
            if failures is not None:
                failures.append((entry.sample_id, str(e)))
            continue

        log.debug(f"Encoded {len(images)} views of sample {entry.sample_id}")
        for image in images:
            for augmented in augmented_copies(image, spec):
                yield augmented, entry.label, image.provenance.plane

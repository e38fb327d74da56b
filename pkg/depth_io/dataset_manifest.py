import csv
import os

from core_data_modules.logging import Logger

from depth_io.data_models import DatasetManifest, ManifestEntry, ManifestError
from depth_io.sample_ids import is_depth_file_name, parse_sample_id

log = Logger(__name__)

ROOT_SOURCE_TAG = "."
MANIFEST_COLUMNS = ["path", "action", "subject", "example", "label", "source"]


class LabelMappingGapError(ManifestError):
    pass


class LabelMappingFormatError(ManifestError):
    pass


class EmptyDatasetError(ManifestError):
    pass


def read_label_mapping(path):
    """
    Reads a label-mapping file, which maps the action ids of one or more source datasets onto the labels of a combined
    dataset.

    Each non-empty line has the form `source_tag old_action_id new_action_id`. Everything after a `#` is a comment.

    :param path: Path to the label-mapping file.
    :type path: str
    :return: Dictionary of (source_tag, old_action_id) -> new_action_id.
    :rtype: dict of (str, int) -> int
    """
    mapping = dict()
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if line == "":
                continue

            fields = line.split()
            if len(fields) != 3:
                raise LabelMappingFormatError(
                    f"{path}:{line_number}: expected 'source_tag old_action_id new_action_id', got '{line}'")
            source_tag, old_action_id, new_action_id = fields
            try:
                old_action_id = int(old_action_id)
                new_action_id = int(new_action_id)
            except ValueError:
                raise LabelMappingFormatError(f"{path}:{line_number}: action ids must be integers, got '{line}'")
            if old_action_id < 1 or new_action_id < 1:
                raise LabelMappingFormatError(f"{path}:{line_number}: action ids must be >= 1, got '{line}'")

            key = (source_tag, old_action_id)
            if key in mapping and mapping[key] != new_action_id:
                raise LabelMappingFormatError(
                    f"{path}:{line_number}: action {old_action_id} of '{source_tag}' is already mapped to "
                    f"{mapping[key]}")
            mapping[key] = new_action_id

    log.info(f"Loaded {len(mapping)} label mappings from '{path}'")
    return mapping


def _list_depth_files(root):
    """
    :return: List of (source_tag, path) for every depth file below `root`, in a deterministic order.
    :rtype: list of (str, str)
    """
    depth_files = []
    for dir_path, dir_names, file_names in os.walk(root):
        dir_names.sort()
        relative_dir = os.path.relpath(dir_path, root)
        source_tag = ROOT_SOURCE_TAG if relative_dir == os.curdir else relative_dir.split(os.sep)[0]
        for file_name in sorted(file_names):
            if is_depth_file_name(file_name):
                depth_files.append((source_tag, os.path.join(dir_path, file_name)))
    return depth_files


def build_manifest(root, mapping=None):
    """
    Builds a manifest of all the depth files below a dataset directory.

    Files directly in `root` have source tag ".". Files in a subdirectory of `root` take the name of the top-level
    subdirectory as their source tag, so several datasets can be combined by placing each in its own subdirectory
    and supplying a label mapping.

    :param root: Dataset directory.
    :type root: str
    :param mapping: Dictionary of (source_tag, action_id) -> label, or None to use each file's action id as its label.
                    If given, every encountered (source_tag, action_id) must be mapped.
    :type mapping: dict of (str, int) -> int | None
    :return: Manifest, with entries sorted by sample id.
    :rtype: depth_io.data_models.DatasetManifest
    """
    if not os.path.isdir(root):
        raise EmptyDatasetError(f"Dataset directory '{root}' does not exist")

    depth_files = _list_depth_files(root)
    if len(depth_files) == 0:
        raise EmptyDatasetError(f"No '*_depth.bin' files found below '{root}'")

    entries = []
    unmapped = set()
    for source_tag, path in depth_files:
        sample_id = parse_sample_id(path)
        if mapping is None:
            label = sample_id.action_id
        else:
            label = mapping.get((source_tag, sample_id.action_id))
            if label is None:
                unmapped.add((source_tag, sample_id.action_id))
                continue
        entries.append(ManifestEntry(sample_id, path, label, source_tag))

    if len(unmapped) > 0:
        raise LabelMappingGapError(
            f"The label mapping has no entry for (source_tag, action_id) {sorted(unmapped)}")

    labels = {entry.label for entry in entries}
    class_count = max(labels)
    missing_labels = sorted(set(range(1, class_count + 1)) - labels)
    if len(missing_labels) > 0:
        raise ManifestError(
            f"Labels must form a contiguous range [1, {class_count}], but no samples have labels {missing_labels}. "
            f"Supply a label mapping to renumber the actions")

    manifest = DatasetManifest(entries, class_count)
    log.info(f"Built a manifest of {len(manifest)} samples of {class_count} classes from '{root}'")
    return manifest


def split(manifest, rule):
    """
    Partitions a manifest into train and test sets by subject.

    :param manifest: Manifest to split.
    :type manifest: depth_io.data_models.DatasetManifest
    :param rule: Rule deciding which subjects are used for training.
    :type rule: depth_io.data_models.SplitRule
    :return: Tuple of (train manifest, test manifest).
    :rtype: (depth_io.data_models.DatasetManifest, depth_io.data_models.DatasetManifest)
    """
    assert len(manifest) > 0, "Cannot split an empty manifest"

    train_entries = []
    test_entries = []
    unassigned_subjects = set()
    for entry in manifest:
        is_train = rule.is_train_subject(entry.sample_id.subject_id)
        if is_train is None:
            unassigned_subjects.add(entry.sample_id.subject_id)
        elif is_train:
            train_entries.append(entry)
        else:
            test_entries.append(entry)

    if len(unassigned_subjects) > 0:
        raise ManifestError(f"Split rule assigns subjects {sorted(unassigned_subjects)} to neither train nor test")

    train = DatasetManifest(train_entries, manifest.class_count, rule)
    test = DatasetManifest(test_entries, manifest.class_count, rule)

    log.info(f"Split {len(manifest)} samples into {len(train)} train samples (subjects {train.subjects()}) and "
             f"{len(test)} test samples (subjects {test.subjects()})")
    if len(train) == 0:
        log.warning(f"Split rule '{rule.kind}' left the train set empty")
    if len(test) == 0:
        log.warning(f"Split rule '{rule.kind}' left the test set empty")

    return train, test


def write_manifest(manifest, path):
    """
    Exports a manifest as a CSV with columns path, action, subject, example, label, source.

    :param manifest: Manifest to export.
    :type manifest: depth_io.data_models.DatasetManifest
    :param path: Path to write the CSV to.
    :type path: str
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=MANIFEST_COLUMNS)
        writer.writeheader()
        for entry in manifest:
            writer.writerow(entry.to_dict())
    log.info(f"Exported a manifest of {len(manifest)} samples to '{path}'")


def read_manifest(path):
    """
    Reads a manifest exported by `write_manifest`.

    The class count is the largest label in the file.

    :param path: Path to the manifest CSV.
    :type path: str
    :rtype: depth_io.data_models.DatasetManifest
    """
    with open(path, "r", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    if len(rows) == 0:
        raise EmptyDatasetError(f"Manifest '{path}' has no entries")

    missing_columns = set(MANIFEST_COLUMNS[:-1]) - set(rows[0].keys())
    if len(missing_columns) > 0:
        raise ManifestError(f"Manifest '{path}' is missing columns {sorted(missing_columns)}")

    entries = [ManifestEntry.from_dict(row) for row in rows]
    manifest = DatasetManifest(entries, max(entry.label for entry in entries))
    log.info(f"Loaded a manifest of {len(manifest)} samples from '{path}'")
    return manifest


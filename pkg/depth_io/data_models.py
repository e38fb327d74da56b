import numpy as np

_MAX_DEPTH_VALUE = 0xFFFFFFFF


class InvalidDepthSequenceError(ValueError):
    pass


class ManifestError(ValueError):
    pass


class DuplicateSampleIdError(ManifestError):
    pass


class DepthSequence(object):
    def __init__(self, frames):
        """
        An ordered sequence of depth frames, as recorded by a depth sensor.

        :param frames: Depth frames of shape (N, height, width), in millimeters. 0 means no return from the sensor.
                       Lists of 2D arrays are stacked.
        :type frames: numpy.ndarray | list of numpy.ndarray
        """
        frames = np.asarray(frames)
        if frames.ndim != 3:
            raise InvalidDepthSequenceError(f"Depth frames must have shape (N, height, width), got {frames.shape}")
        if frames.shape[0] < 1:
            raise InvalidDepthSequenceError("A depth sequence must contain at least 1 frame")
        if frames.shape[1] < 1 or frames.shape[2] < 1:
            raise InvalidDepthSequenceError(f"Depth frames must be non-empty, got {frames.shape[1]}x{frames.shape[2]}")
        if not np.issubdtype(frames.dtype, np.integer):
            if not np.all(np.equal(np.mod(frames, 1), 0)):
                raise InvalidDepthSequenceError("Depth values must be integers")
        if frames.min() < 0:
            raise InvalidDepthSequenceError("Depth values must be non-negative")
        if frames.max() > _MAX_DEPTH_VALUE:
            raise InvalidDepthSequenceError(f"Depth values must fit in 32 bits, got {frames.max()}")

        self.frames = frames.astype(np.uint32)

    @property
    def frame_count(self):
        return self.frames.shape[0]

    @property
    def height(self):
        return self.frames.shape[1]

    @property
    def width(self):
        return self.frames.shape[2]

    def __eq__(self, other):
        return isinstance(other, DepthSequence) and np.array_equal(self.frames, other.frames)

    def __repr__(self):
        return f"DepthSequence(frame_count={self.frame_count}, width={self.width}, height={self.height})"


class SampleId(object):
    def __init__(self, action_id, subject_id, example_id):
        """
        Identifies one recording in a dataset, following the `axxx_sxxx_exxx` naming convention.

        :param action_id: Action (class) id, >= 1.
        :type action_id: int
        :param subject_id: Id of the subject who performed the action, >= 1.
        :type subject_id: int
        :param example_id: Repetition number of this action by this subject, >= 1.
        :type example_id: int
        """
        for name, value in [("action_id", action_id), ("subject_id", subject_id), ("example_id", example_id)]:
            if int(value) != value or value < 1:
                raise ValueError(f"SampleId {name} must be a positive integer, got {value}")

        self.action_id = int(action_id)
        self.subject_id = int(subject_id)
        self.example_id = int(example_id)

    def as_tuple(self):
        return self.action_id, self.subject_id, self.example_id

    def __eq__(self, other):
        return isinstance(other, SampleId) and self.as_tuple() == other.as_tuple()

    def __lt__(self, other):
        return self.as_tuple() < other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"SampleId{self.as_tuple()}"

    def to_dict(self):
        return {
            "action_id": self.action_id,
            "subject_id": self.subject_id,
            "example_id": self.example_id
        }


class SplitRuleKinds(object):
    ODD_TRAIN = "odd-train"    # Odd subject ids train, even subject ids test.
    EXPLICIT = "explicit"      # Train and test subjects are listed explicitly.

    VALUES = {ODD_TRAIN, EXPLICIT}


class SplitRule(object):
    def __init__(self, kind, train_subjects=None, test_subjects=None):
        """
        Rule for partitioning a dataset into train and test sets by subject.

        :param kind: One of `SplitRuleKinds.VALUES`.
        :type kind: str
        :param train_subjects: Subjects to train on. Required if `kind` is `SplitRuleKinds.EXPLICIT`.
        :type train_subjects: iterable of int | None
        :param test_subjects: Subjects to test on. Required if `kind` is `SplitRuleKinds.EXPLICIT`.
        :type test_subjects: iterable of int | None
        """
        assert kind in SplitRuleKinds.VALUES, kind

        if kind == SplitRuleKinds.EXPLICIT:
            assert train_subjects is not None and test_subjects is not None, \
                "Explicit split rules need both train_subjects and test_subjects"
            train_subjects = sorted(set(train_subjects))
            test_subjects = sorted(set(test_subjects))
            overlap = set(train_subjects) & set(test_subjects)
            if len(overlap) > 0:
                raise ValueError(f"Subjects {sorted(overlap)} are in both the train and test subject lists")

        self.kind = kind
        self.train_subjects = train_subjects
        self.test_subjects = test_subjects

    @classmethod
    def odd_train(cls):
        return cls(SplitRuleKinds.ODD_TRAIN)

    @classmethod
    def explicit(cls, train_subjects, test_subjects):
        return cls(SplitRuleKinds.EXPLICIT, train_subjects, test_subjects)

    def is_train_subject(self, subject_id):
        """
        :param subject_id: Subject to classify.
        :type subject_id: int
        :return: True if the subject belongs to the train side, False if to the test side, None if this rule doesn't
                 mention the subject.
        :rtype: bool | None
        """
        if self.kind == SplitRuleKinds.ODD_TRAIN:
            return subject_id % 2 == 1

        if subject_id in self.train_subjects:
            return True
        if subject_id in self.test_subjects:
            return False
        return None

    def to_dict(self):
        return {
            "kind": self.kind,
            "train_subjects": self.train_subjects,
            "test_subjects": self.test_subjects
        }


class ManifestEntry(object):
    def __init__(self, sample_id, path, label, source_tag="."):
        """
        :param sample_id: Id parsed from the file's name.
        :type sample_id: SampleId
        :param path: Path to the depth file.
        :type path: str
        :param label: Class label after remapping, in [1, class_count].
        :type label: int
        :param source_tag: Name of the source tree the file was found in, or "." for the dataset root.
        :type source_tag: str
        """
        self.sample_id = sample_id
        self.path = path
        self.label = label
        self.source_tag = source_tag

    def to_dict(self):
        return {
            "path": self.path,
            "action": self.sample_id.action_id,
            "subject": self.sample_id.subject_id,
            "example": self.sample_id.example_id,
            "label": self.label,
            "source": self.source_tag
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            SampleId(int(d["action"]), int(d["subject"]), int(d["example"])),
            d["path"],
            int(d["label"]),
            d.get("source", ".")
        )


class DatasetManifest(object):
    def __init__(self, entries, class_count, split_rule=None):
        """
        The labelled samples of a dataset.

        Sample ids are unique within each source tree. Separate source trees of a combined dataset may reuse ids.

        :param entries: Manifest entries. These are sorted by sample id, then source tag.
        :type entries: iterable of ManifestEntry
        :param class_count: Number of classes. Labels must cover exactly [1, class_count] unless this manifest is one
                            side of a split.
        :type class_count: int
        :param split_rule: Rule this manifest was split with, if any.
        :type split_rule: SplitRule | None
        """
        self.entries = sorted(entries, key=lambda entry: (entry.sample_id, entry.source_tag))
        self.class_count = class_count
        self.split_rule = split_rule

        self._entries_by_key = dict()
        for entry in self.entries:
            key = (entry.source_tag, entry.sample_id)
            if key in self._entries_by_key:
                raise DuplicateSampleIdError(
                    f"Duplicate sample id {entry.sample_id} in source '{entry.source_tag}': "
                    f"'{self._entries_by_key[key].path}' and '{entry.path}'")
            self._entries_by_key[key] = entry
            assert 1 <= entry.label <= class_count, f"Label {entry.label} outside [1, {class_count}]"

    def subjects(self):
        return sorted({entry.sample_id.subject_id for entry in self.entries})

    def entry_for(self, source_tag, sample_id):
        """
        :return: The entry with the given source tag and sample id, or None if there isn't one.
        :rtype: ManifestEntry | None
        """
        return self._entries_by_key.get((source_tag, sample_id))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

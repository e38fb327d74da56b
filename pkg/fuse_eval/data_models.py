class SampleResult(object):
    def __init__(self, sample_id, source_tag, true_label, predicted_label=None, scores=None, error=None):
        """
        Outcome of classifying one test sample. Exactly one of `scores` and `error` is set.

        :param sample_id: Sample that was classified.
        :type sample_id: depth_io.data_models.SampleId
        :param source_tag: Dataset the sample came from.
        :type source_tag: str
        :param true_label: Ground truth label.
        :type true_label: int
        :param predicted_label: Predicted label, or None if the sample could not be classified.
        :type predicted_label: int | None
        :param scores: Fused class posteriors, or None if the sample could not be classified.
        :type scores: numpy.ndarray | None
        :param error: Why the sample could not be classified, or None.
        :type error: str | None
        """
        assert (scores is None) != (error is None), "A sample result has either scores or an error"

        self.sample_id = sample_id
        self.source_tag = source_tag
        self.true_label = true_label
        self.predicted_label = predicted_label
        self.scores = scores
        self.error = error

    @property
    def is_error(self):
        return self.error is not None


class EvalReport(object):
    def __init__(self, accuracy, correct_count, evaluated_count, per_class_accuracy, confusion_matrix, per_source,
                 per_subject, errors, settings=None):
        """
        Summary of classifying a test set.

        :param accuracy: Fraction of the classified samples that were classified correctly, or None if no samples
                         could be classified.
        :type accuracy: float | None
        :param correct_count: Number of correctly classified samples.
        :type correct_count: int
        :param evaluated_count: Number of classified samples. Samples that errored are not included.
        :type evaluated_count: int
        :param per_class_accuracy: Dictionary of true label -> accuracy, or None for classes with no test samples.
        :type per_class_accuracy: dict of int -> (float | None)
        :param confusion_matrix: K x K counts. Rows are true labels, columns are predicted labels.
        :type confusion_matrix: numpy.ndarray
        :param per_source: Dictionary of source tag -> {"correct", "total", "accuracy"}.
        :type per_source: dict of str -> dict
        :param per_subject: Dictionary of subject id -> {"correct", "total", "accuracy"}.
        :type per_subject: dict of int -> dict
        :param errors: {"sample", "source", "error"} of each sample that could not be classified.
        :type errors: list of dict
        :param settings: Settings the evaluation ran with, echoed into the report.
        :type settings: dict | None
        """
        self.accuracy = accuracy
        self.correct_count = correct_count
        self.evaluated_count = evaluated_count
        self.per_class_accuracy = per_class_accuracy
        self.confusion_matrix = confusion_matrix
        self.per_source = per_source
        self.per_subject = per_subject
        self.errors = errors
        self.settings = {} if settings is None else settings

    @property
    def class_count(self):
        return self.confusion_matrix.shape[0]

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "correct": self.correct_count,
            "evaluated": self.evaluated_count,
            "class_count": self.class_count,
            "per_class_accuracy": {str(label): acc for label, acc in self.per_class_accuracy.items()},
            "confusion_matrix": self.confusion_matrix.tolist(),
            "per_source": self.per_source,
            "per_subject": {str(subject): summary for subject, summary in self.per_subject.items()},
            "errors": self.errors,
            "settings": self.settings
        }

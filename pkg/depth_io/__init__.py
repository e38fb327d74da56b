from depth_io.data_models import (DepthSequence, SampleId, SplitRule, SplitRuleKinds, ManifestEntry, DatasetManifest,
                                  InvalidDepthSequenceError, ManifestError, DuplicateSampleIdError)
from depth_io.depth_sequence_io import (read_sequence, read_sequence_header, write_sequence, DepthFileError,
                                        TruncatedDepthFileError, DepthFileSizeMismatchError, EmptyDepthSequenceError)
from depth_io.sample_ids import parse_sample_id, format_sample_id, is_depth_file_name, SampleIdParseError
from depth_io.dataset_manifest import (build_manifest, split, read_label_mapping, write_manifest, read_manifest,
                                       LabelMappingGapError, LabelMappingFormatError, EmptyDatasetError)

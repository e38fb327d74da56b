from encode_augment.colormap import colormap
from encode_augment.data_models import (ImageProvenance, PseudoRgbImage, AugmentSpec, ImageProvenanceParseError,
                                        IMAGE_FILE_SUFFIX)
from encode_augment.encode_augment import (normalize, encode, augment, center_crop, derive_seed, augmented_copies,
                                           write_image, read_image, encoded_views, enumerate_training_set,
                                           EncodingError)

import numpy as np

from projection.data_models import ViewPlanes


class FusionError(ValueError):
    pass


def _mean_scores(scores, what):
    if len(scores) == 0:
        raise FusionError(f"Cannot fuse an empty set of {what} scores")

    lengths = {len(s) for s in scores}
    if len(lengths) > 1:
        raise FusionError(f"Cannot fuse {what} scores over differing class counts {sorted(lengths)}")

    return np.mean(np.stack([np.asarray(s, dtype=np.float64) for s in scores]), axis=0)


def fuse_scales(scores):
    """
    Fuses the class scores of one plane across temporal scales by taking their arithmetic mean.

    :param scores: Score vectors, one per scale.
    :type scores: list of numpy.ndarray
    :rtype: numpy.ndarray
    """
    return _mean_scores(list(scores), "scale")


def fuse_planes(scores_by_plane):
    """
    Fuses the class scores of the front, side and top planes by taking their arithmetic mean.

    :param scores_by_plane: Dictionary of plane -> score vector. Must contain every plane of `ViewPlanes.VALUES`
                            and no others.
    :type scores_by_plane: dict of str -> numpy.ndarray
    :rtype: numpy.ndarray
    """
    if set(scores_by_plane.keys()) != set(ViewPlanes.VALUES):
        raise FusionError(f"Plane fusion needs scores for exactly the planes {ViewPlanes.VALUES}, "
                          f"got {sorted(scores_by_plane.keys())}")
    return _mean_scores([scores_by_plane[plane] for plane in ViewPlanes.VALUES], "plane")

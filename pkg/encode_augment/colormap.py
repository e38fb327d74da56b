import numpy as np

# Centre of the tent of each of the R, G and B channels.
_CHANNEL_CENTRES = np.array([0.25, 0.5, 0.75])


def colormap(values):
    """
    Maps normalized values to RGB with a jet-like colormap: dark red through yellow and cyan to dark blue.

    Each channel is clamp(1.5 - 4|v - c|, 0, 1) for c = 0.25, 0.5 and 0.75 respectively, quantized as
    floor(255x + 0.5).

    :param values: Values in [0, 1], of any shape.
    :type values: numpy.ndarray
    :return: uint8 array of shape values.shape + (3,).
    :rtype: numpy.ndarray
    """
    values = np.asarray(values, dtype=np.float64)
    intensities = np.clip(1.5 - 4 * np.abs(values[..., np.newaxis] - _CHANNEL_CENTRES), 0, 1)
    return np.floor(255 * intensities + 0.5).astype(np.uint8)

import cv2
import numpy as np
from core_data_modules.logging import Logger

from classify.data_models import SoftmaxRegressionModel
from projection.data_models import ViewPlanes

log = Logger(__name__)


class MissingClassError(ValueError):
    pass


class FeatureDimensionMismatchError(ValueError):
    pass


class NumericDivergenceError(ArithmeticError):
    def __init__(self, epoch, loss):
        super().__init__(f"Training diverged in epoch {epoch}: loss is {loss}")
        self.epoch = epoch
        self.loss = loss


def featurize(image, side=32):
    """
    Converts an image to a feature vector: the image is area-downsampled to side x side pixels, its channels are
    concatenated channel-major and the intensities are scaled to [0, 1].

    :param image: Image to featurize.
    :type image: encode_augment.data_models.PseudoRgbImage
    :param side: Side of the downsampled image.
    :type side: int
    :return: Feature vector of length 3 * side * side.
    :rtype: numpy.ndarray of float32
    """
    pixels = image.pixels
    if pixels.shape[:2] != (side, side):
        pixels = cv2.resize(pixels, (side, side), interpolation=cv2.INTER_AREA)
    return pixels.transpose(2, 0, 1).reshape(-1).astype(np.float32) / 255


def softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _log_softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def loss_and_gradient(weights, bias, features, labels, weight_decay):
    """
    Computes the mean cross-entropy of a softmax regression model plus the L2 penalty (weight_decay / 2)·‖W‖², and
    its gradient.

    :param weights: Weights of shape (K, D).
    :type weights: numpy.ndarray
    :param bias: Biases of shape (K,).
    :type bias: numpy.ndarray
    :param features: Features of shape (M, D).
    :type features: numpy.ndarray
    :param labels: 1-based labels of shape (M,).
    :type labels: numpy.ndarray
    :param weight_decay: L2 penalty coefficient. The bias is not penalized.
    :type weight_decay: float
    :return: Tuple of (loss, gradient w.r.t. weights, gradient w.r.t. bias).
    :rtype: (float, numpy.ndarray, numpy.ndarray)
    """
    example_count = features.shape[0]
    targets = labels - 1
    logits = features @ weights.T + bias

    log_probabilities = _log_softmax(logits)
    loss = -log_probabilities[np.arange(example_count), targets].mean() + weight_decay / 2 * np.sum(weights ** 2)

    residuals = np.exp(log_probabilities)
    residuals[np.arange(example_count), targets] -= 1
    residuals /= example_count

    return float(loss), residuals.T @ features + weight_decay * weights, residuals.sum(axis=0)


def _check_labels(labels, class_count):
    out_of_range = sorted({int(label) for label in labels if not 1 <= label <= class_count})
    if len(out_of_range) > 0:
        raise ValueError(f"Labels {out_of_range} are outside the class range [1, {class_count}]")

    missing = sorted(set(range(1, class_count + 1)) - {int(label) for label in labels})
    if len(missing) > 0:
        raise MissingClassError(f"No training examples for classes {missing}")


def train(examples, class_count, cfg, initial_model=None):
    """
    Trains a softmax regression classifier with mini-batch momentum SGD and L2 weight decay.

    Each epoch visits the examples in a fresh random order. The learning rate is decayed by cfg.lr_decay_factor
    every cfg.lr_decay_every epochs. Training starts from all-zero parameters, or from a copy of `initial_model` with
    the fine-tuning learning rate.

    :param examples: (feature vector, 1-based label) pairs.
    :type examples: iterable of (numpy.ndarray, int)
    :param class_count: Number of classes K. Every class must have at least one example.
    :type class_count: int
    :param cfg: Training settings.
    :type cfg: classify.data_models.TrainConfig
    :param initial_model: Model to warm start from, or None to train from scratch.
    :type initial_model: classify.data_models.SoftmaxRegressionModel | None
    :rtype: classify.data_models.SoftmaxRegressionModel
    """
    examples = list(examples)
    if len(examples) == 0:
        raise MissingClassError("Cannot train a classifier without examples")

    features = np.stack([np.asarray(feature, dtype=np.float64) for feature, _ in examples])
    labels = np.array([label for _, label in examples], dtype=np.int64)
    _check_labels(labels, class_count)
    example_count, feature_dimension = features.shape

    if initial_model is None:
        model = SoftmaxRegressionModel.zeros(class_count, feature_dimension)
    else:
        if initial_model.feature_dimension != feature_dimension or initial_model.class_count != class_count:
            raise FeatureDimensionMismatchError(
                f"Initial model is {initial_model.class_count}x{initial_model.feature_dimension} but the training "
                f"set is {class_count}x{feature_dimension}")
        model = initial_model.copy()
    weights, bias = model.weights, model.bias

    log.info(f"Training a {class_count}-class softmax regression on {example_count} examples of dimension "
             f"{feature_dimension}{'' if initial_model is None else ', warm started'}")

    rng = np.random.default_rng(cfg.seed)
    weights_velocity = np.zeros_like(weights)
    bias_velocity = np.zeros_like(bias)
    loss_history = []
    for epoch in range(cfg.epochs):
        learning_rate = cfg.learning_rate_at(epoch, fine_tune=initial_model is not None)
        order = rng.permutation(example_count)
        for start in range(0, example_count, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            _, weights_gradient, bias_gradient = loss_and_gradient(
                weights, bias, features[batch], labels[batch], cfg.weight_decay)

            weights_velocity = cfg.momentum * weights_velocity + weights_gradient
            bias_velocity = cfg.momentum * bias_velocity + bias_gradient
            weights -= learning_rate * weights_velocity
            bias -= learning_rate * bias_velocity

        with np.errstate(over="ignore", invalid="ignore"):
            loss, _, _ = loss_and_gradient(weights, bias, features, labels, cfg.weight_decay)
        if not np.isfinite(loss):
            raise NumericDivergenceError(epoch + 1, loss)
        loss_history.append(loss)
        log.debug(f"Epoch {epoch + 1}/{cfg.epochs}: learning rate {learning_rate:g}, loss {loss:.6f}")

    if len(loss_history) == 0:
        final_loss, _, _ = loss_and_gradient(weights, bias, features, labels, cfg.weight_decay)
    else:
        final_loss = loss_history[-1]
    log.info(f"Trained softmax regression, final loss {final_loss:.6f}")
    return SoftmaxRegressionModel(weights, bias, final_loss, loss_history)


def predict(model, feature):
    """
    :param model: Trained model.
    :type model: classify.data_models.SoftmaxRegressionModel
    :param feature: Feature vector of length model.feature_dimension.
    :type feature: numpy.ndarray
    :return: Class posteriors, a length-K vector on the probability simplex.
    :rtype: numpy.ndarray
    """
    feature = np.asarray(feature, dtype=np.float64)
    if feature.shape != (model.feature_dimension,):
        raise FeatureDimensionMismatchError(
            f"Model expects features of dimension {model.feature_dimension}, got shape {feature.shape}")
    return softmax(model.weights @ feature + model.bias)


def train_plane_models(stream, class_count, cfg, side=32, initial_models=None):
    """
    Trains one classifier per view plane from a stream of labelled images.

    :param stream: (image, label, plane) triples, as produced by `enumerate_training_set`.
    :type stream: iterable of (encode_augment.data_models.PseudoRgbImage, int, str)
    :param class_count: Number of classes.
    :type class_count: int
    :param cfg: Training settings.
    :type cfg: classify.data_models.TrainConfig
    :param side: Side of the featurized images.
    :type side: int
    :param initial_models: Dictionary of plane -> model to warm start each plane's classifier from.
    :type initial_models: dict of str -> classify.data_models.SoftmaxRegressionModel | None
    :return: Dictionary of plane -> trained model.
    :rtype: dict of str -> classify.data_models.SoftmaxRegressionModel
    """
    examples = {plane: [] for plane in ViewPlanes.VALUES}
    for image, label, plane in stream:
        examples[plane].append((featurize(image, side), label))

    models = dict()
    for plane in ViewPlanes.VALUES:
        log.info(f"Training the classifier of plane '{plane}'...")
        initial_model = None if initial_models is None else initial_models.get(plane)
        models[plane] = train(examples[plane], class_count, cfg, initial_model)
    return models

import numpy as np


class TrainConfig(object):
    def __init__(self, learning_rate=0.01, momentum=0.9, weight_decay=0.0005, batch_size=256, epochs=100,
                 lr_decay_every=20, lr_decay_factor=0.1, seed=0, fine_tune_learning_rate=0.001):
        """
        Settings for training a softmax regression classifier with momentum SGD.

        :param learning_rate: Initial learning rate when training from scratch.
        :type learning_rate: float
        :param momentum: Momentum coefficient, in [0, 1).
        :type momentum: float
        :param weight_decay: L2 penalty coefficient on the weights.
        :type weight_decay: float
        :param batch_size: Mini-batch size.
        :type batch_size: int
        :param epochs: Number of passes over the training examples. 0 leaves the model at its initialization.
        :type epochs: int
        :param lr_decay_every: The learning rate is multiplied by `lr_decay_factor` every this many epochs.
        :type lr_decay_every: int
        :param lr_decay_factor: Learning rate decay factor.
        :type lr_decay_factor: float
        :param seed: Seed of the mini-batch shuffling.
        :type seed: int
        :param fine_tune_learning_rate: Initial learning rate when warm starting from an existing model.
        :type fine_tune_learning_rate: float
        """
        if not learning_rate > 0 or not fine_tune_learning_rate > 0:
            raise ValueError("Learning rates must be > 0")
        if not 0 <= momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {momentum}")
        if weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {weight_decay}")
        if batch_size < 1 or lr_decay_every < 1:
            raise ValueError("batch_size and lr_decay_every must be >= 1")
        if epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {epochs}")

        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.batch_size = int(batch_size)
        self.epochs = int(epochs)
        self.lr_decay_every = int(lr_decay_every)
        self.lr_decay_factor = lr_decay_factor
        self.seed = int(seed)
        self.fine_tune_learning_rate = fine_tune_learning_rate

    def learning_rate_at(self, epoch, fine_tune=False):
        """
        :param epoch: 0-based epoch.
        :type epoch: int
        :param fine_tune: Whether training is warm started from an existing model.
        :type fine_tune: bool
        :rtype: float
        """
        base = self.fine_tune_learning_rate if fine_tune else self.learning_rate
        return base * self.lr_decay_factor ** (epoch // self.lr_decay_every)

    def to_dict(self):
        return {
            "learning_rate": self.learning_rate,
            "fine_tune_learning_rate": self.fine_tune_learning_rate,
            "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "lr_decay_every": self.lr_decay_every,
            "lr_decay_factor": self.lr_decay_factor,
            "seed": self.seed
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class SoftmaxRegressionModel(object):
    def __init__(self, weights, bias, final_loss=None, loss_history=None):
        """
        Multinomial logistic regression classifier. Class k (1-based) has weights[k - 1] and bias[k - 1].

        :param weights: Weights of shape (class_count, feature_dimension).
        :type weights: numpy.ndarray
        :param bias: Biases of shape (class_count,).
        :type bias: numpy.ndarray
        :param final_loss: Regularized training loss after the last epoch, if the model was trained.
        :type final_loss: float | None
        :param loss_history: Regularized training loss after each epoch, if the model was trained.
        :type loss_history: list of float | None
        """
        weights = np.asarray(weights, dtype=np.float64)
        bias = np.asarray(bias, dtype=np.float64)
        assert weights.ndim == 2 and weights.shape[0] >= 1, f"Expected (K, D) weights, got {weights.shape}"
        assert bias.shape == (weights.shape[0],), f"Expected {weights.shape[0]} biases, got {bias.shape}"

        self.weights = weights
        self.bias = bias
        self.final_loss = final_loss
        self.loss_history = [] if loss_history is None else list(loss_history)

    @classmethod
    def zeros(cls, class_count, feature_dimension):
        return cls(np.zeros((class_count, feature_dimension)), np.zeros(class_count))

    @property
    def class_count(self):
        return self.weights.shape[0]

    @property
    def feature_dimension(self):
        return self.weights.shape[1]

    def copy(self):
        return SoftmaxRegressionModel(self.weights.copy(), self.bias.copy(), self.final_loss, self.loss_history)

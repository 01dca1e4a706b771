import numpy as np
from django.conf import settings

from .exceptions import DimensionMismatchError, PredictorError


def relu(x):
    return np.maximum(x, 0.0)


def mse_loss(predictions, targets, weights=None):
    """(1 / 2k) sum w_j (y_hat_j - y_j)^2; unit weights by default."""
    predictions = np.asarray(predictions, dtype=float).ravel()
    targets = np.asarray(targets, dtype=float).ravel()
    if not len(predictions):
        raise PredictorError("Loss needs a non-empty batch.")
    if len(predictions) != len(targets):
        raise PredictorError(
            f"{len(predictions)} prediction(s) for {len(targets)} target(s)."
        )
    errors = predictions - targets
    if weights is not None:
        return float(np.sum(np.asarray(weights, float) * errors**2) / (2 * len(errors)))
    return float(np.sum(errors**2) / (2 * len(errors)))


class ResidualNet:
    """
    Dense residual regressor.

    ``layers`` is a list of (W, b) pairs: an input layer H_0 = f(x W_0 + b_0),
    residual blocks H_i = f(f(H_{i-1} W_i + b_i) + H_{i-1}) and a linear
    output layer. f is ReLU. Every block is square, so skips need no
    projection.
    """

    def __init__(self, layers):
        self.layers = [
            (np.array(W, dtype=float), np.array(b, dtype=float).ravel())
            for W, b in layers
        ]
        if len(self.layers) < 2:
            raise PredictorError("A network needs an input and an output layer.")
        self._check_shapes()

    @classmethod
    def initialize(cls, input_dim, hidden=None, blocks=None, seed=None):
        """He-uniform weights and zero biases from a seeded generator."""
        config = settings.GRASPPRINT
        hidden = config["HIDDEN_WIDTH"] if hidden is None else hidden
        blocks = config["RESIDUAL_BLOCKS"] if blocks is None else blocks
        rng = np.random.default_rng(config["SEED"] if seed is None else seed)
        dims = [(input_dim, hidden)] + [(hidden, hidden)] * blocks + [(hidden, 1)]
        layers = []
        for fan_in, fan_out in dims:
            limit = np.sqrt(6.0 / fan_in)
            layers.append(
                (rng.uniform(-limit, limit, (fan_in, fan_out)), np.zeros(fan_out))
            )
        return cls(layers)

    def _check_shapes(self):
        for index, (W, b) in enumerate(self.layers):
            name = self.layer_name(index)
            if W.ndim != 2 or len(b) != W.shape[1]:
                raise DimensionMismatchError(name, W.shape[-1], len(b))
            if 0 < index < len(self.layers) - 1 and W.shape[0] != W.shape[1]:
                raise DimensionMismatchError(name, W.shape[0], W.shape[1])
            if index:
                expected = self.layers[index - 1][0].shape[1]
                if W.shape[0] != expected:
                    raise DimensionMismatchError(name, W.shape[0], expected)
        if self.layers[-1][0].shape[1] != 1:
            raise DimensionMismatchError("output", 1, self.layers[-1][0].shape[1])

    def layer_name(self, index):
        if index == 0:
            return "input"
        if index == len(self.layers) - 1:
            return "output"
        return f"block_{index}"

    @property
    def input_dim(self):
        return self.layers[0][0].shape[0]

    @property
    def hidden(self):
        return self.layers[0][0].shape[1]

    @property
    def block_count(self):
        return len(self.layers) - 2

    def _prepare(self, inputs):
        X = np.asarray(inputs, dtype=float)
        X = X.reshape(1, -1) if X.ndim == 1 else X
        if X.shape[1] != self.input_dim:
            raise DimensionMismatchError("input", self.input_dim, X.shape[1])
        return X

    def _forward(self, X):
        W, b = self.layers[0]
        z = X @ W + b
        cache = [(X, z)]
        H = relu(z)
        for W, b in self.layers[1:-1]:
            z = H @ W + b
            s = relu(z) + H
            cache.append((H, z, s))
            H = relu(s)
        W, b = self.layers[-1]
        cache.append(H)
        return (H @ W + b).ravel(), cache

    def forward(self, inputs):
        """Predictions for a batch (n x input_dim) or a single input vector."""
        return self._forward(self._prepare(inputs))[0]

    __call__ = forward

    def backward(self, inputs, targets, weights=None):
        """
        Loss and its gradients for one batch.

        Returns (loss, [(dW, db), ...]) aligned with ``layers``.
        """
        X = self._prepare(inputs)
        targets = np.asarray(targets, dtype=float).ravel()
        predictions, cache = self._forward(X)
        loss = mse_loss(predictions, targets, weights)
        g = (predictions - targets) / len(targets)
        if weights is not None:
            g = g * np.asarray(weights, dtype=float)
        g = g[:, None]

        grads = [None] * len(self.layers)
        H = cache[-1]
        W, _ = self.layers[-1]
        grads[-1] = (H.T @ g, g.sum(axis=0))
        dH = g @ W.T
        for index in range(len(self.layers) - 2, 0, -1):
            H_prev, z, s = cache[index]
            W, _ = self.layers[index]
            ds = dH * (s > 0)
            dz = ds * (z > 0)
            grads[index] = (H_prev.T @ dz, dz.sum(axis=0))
            dH = ds + dz @ W.T
        X, z = cache[0]
        dz = dH * (z > 0)
        grads[0] = (X.T @ dz, dz.sum(axis=0))
        return loss, grads

    def step(self, grads, learning_rate):
        for (W, b), (dW, db) in zip(self.layers, grads):
            W -= learning_rate * dW
            b -= learning_rate * db

    def parameters(self):
        return np.concatenate([np.concatenate([W.ravel(), b]) for W, b in self.layers])

    def set_parameters(self, vector):
        vector = np.asarray(vector, dtype=float)
        start = 0
        for W, b in self.layers:
            W.flat[:] = vector[start : start + W.size]
            start += W.size
            b[:] = vector[start : start + b.size]
            start += b.size

    def copy(self):
        return ResidualNet([(W.copy(), b.copy()) for W, b in self.layers])

    def to_dict(self):
        return {
            "dims": [self.input_dim] + [W.shape[1] for W, _ in self.layers],
            "layers": [
                {"name": self.layer_name(i), "W": W.ravel().tolist(), "b": b.tolist()}
                for i, (W, b) in enumerate(self.layers)
            ],
        }

    @classmethod
    def from_dict(cls, data):
        dims = data["dims"]
        if len(dims) != len(data["layers"]) + 1:
            raise PredictorError("Checkpoint dims do not match its layer count.")
        layers = []
        for (fan_in, fan_out), layer in zip(zip(dims, dims[1:]), data["layers"]):
            weights = np.asarray(layer["W"], dtype=float)
            if weights.size != fan_in * fan_out:
                raise DimensionMismatchError(
                    layer["name"], fan_in * fan_out, weights.size
                )
            layers.append((weights.reshape(fan_in, fan_out), layer["b"]))
        return cls(layers)

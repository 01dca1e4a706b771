class PredictorError(ValueError):
    """Base class for predictor failures."""


class DimensionMismatchError(PredictorError):
    def __init__(self, layer, expected, actual):
        self.layer = layer
        self.expected = int(expected)
        self.actual = int(actual)
        super().__init__(
            f"Layer '{layer}' expects inputs of width {self.expected}, "
            f"got {self.actual}."
        )


class TrainingDivergedError(PredictorError):
    """Loss became NaN or infinite; ``state`` holds the last finite network."""

    def __init__(self, epoch, loss, state):
        self.epoch = int(epoch)
        self.loss = float(loss)
        self.state = state
        super().__init__(
            f"Training diverged at epoch {self.epoch} (loss {self.loss}); "
            f"lower the learning rate."
        )

import logging

import numpy as np
from django.conf import settings

from .domain import EnergyPredictor, PredictionReport, Standardizer, TrainState
from .exceptions import PredictorError, TrainingDivergedError
from .network import ResidualNet, mse_loss

logger = logging.getLogger(__name__)


def train(state, features, labels, weights=None, validation=None):
    """
    Mini-batch SGD on the (weighted) MSE loss.

    Batches are drawn from a permutation seeded by ``state.seed``. The loss
    over the whole training set is appended to ``state.losses`` after every
    epoch, and likewise for ``validation`` = (features, labels).

    Raises:
        TrainingDivergedError: the loss stopped being finite. The error holds
            the network as it was after the last finite epoch.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float).ravel()
    if not len(y):
        raise PredictorError("Training needs at least one sample.")
    w = None if weights is None else np.asarray(weights, dtype=float).ravel()
    net = state.net
    rng = np.random.default_rng(state.seed)
    last_finite = net.copy()

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(state.epochs):
            order = rng.permutation(len(y))
            for start in range(0, len(y), state.batch_size):
                batch = order[start : start + state.batch_size]
                _, grads = net.backward(
                    X[batch], y[batch], None if w is None else w[batch]
                )
                net.step(grads, state.learning_rate)
            loss = mse_loss(net(X), y, w)
            if not np.isfinite(loss) or not np.all(np.isfinite(net.parameters())):
                state.net = last_finite
                raise TrainingDivergedError(epoch, loss, last_finite)
            state.losses.append(loss)
            if validation is not None:
                state.validation_losses.append(
                    mse_loss(net(validation[0]), validation[1])
                )
            last_finite = net.copy()
            if epoch % 25 == 0 or epoch == state.epochs - 1:
                logger.debug("Epoch %d: loss %.6g", epoch, loss)
    return state


def fit_predictor(dataset, validation=None, *, pseudo_weight=None, **options):
    """
    Standardize ``dataset``, train a fresh network on it and wrap the result.

    ``options`` may set hidden, blocks, learning_rate, batch_size, epochs and
    seed; unset values come from settings.GRASPPRINT.
    """
    if not len(dataset):
        raise PredictorError("Training needs at least one sample.")
    inputs = Standardizer.fit(dataset.features)
    targets = Standardizer.fit(dataset.labels)
    seed = options.get("seed")
    net = ResidualNet.initialize(
        dataset.features.shape[1],
        hidden=options.get("hidden"),
        blocks=options.get("blocks"),
        seed=seed,
    )
    state = TrainState.for_network(
        net,
        learning_rate=options.get("learning_rate"),
        batch_size=options.get("batch_size"),
        epochs=options.get("epochs"),
        seed=seed,
    )
    held_out = None
    if validation is not None and len(validation):
        held_out = (
            inputs.transform(validation.features),
            targets.transform(validation.labels),
        )
    train(
        state,
        inputs.transform(dataset.features),
        targets.transform(dataset.labels),
        weights=dataset.sample_weights(pseudo_weight),
        validation=held_out,
    )
    logger.info(
        "Trained on %d sample(s) for %d epoch(s): loss %.4g -> %.4g",
        len(dataset),
        state.epochs,
        state.losses[0] if state.losses else float("nan"),
        state.losses[-1] if state.losses else float("nan"),
    )
    return EnergyPredictor(net=state.net, inputs=inputs, targets=targets), state


def evaluate(predictor, dataset):
    """Unweighted loss of ``predictor`` on ``dataset`` in kJ^2."""
    return mse_loss(predictor.predict(dataset.features), dataset.labels)


def predict_model(predictor, dataset, model=None, theoretical=None):
    """
    Per-layer prediction report for one model of ``dataset``.

    ``theoretical`` defaults to the dataset labels of that model.
    """
    name = model or dataset.model_names[0]
    rows = dataset.for_model(name)
    if not len(rows):
        raise PredictorError(f"Dataset has no rows for model '{name}'.")
    theoretical = rows.labels if theoretical is None else theoretical
    return PredictionReport(
        model=name,
        heights=rows.column("h_n"),
        predicted=predictor.predict(rows.features),
        theoretical=np.asarray(theoretical, dtype=float),
    )


def compare_pose_training(dataset, validation, *, size=None, **options):
    """
    Train on the mixed multi-pose set and on each single-pose subset.

    Every training set holds ``size`` rows (default: the smallest model), so
    the comparison isolates pose diversity from sample count. Returns the
    validation losses keyed "augmented" and per model under "single".
    """
    names = dataset.model_names
    if len(names) < 2:
        raise PredictorError("Comparison needs samples from at least two poses.")
    sizes = {name: len(dataset.for_model(name)) for name in names}
    size = min(sizes.values()) if size is None else size
    seed = options.get("seed", settings.GRASPPRINT["SEED"])
    rng = np.random.default_rng(seed)

    mixed = dataset.subset(np.sort(rng.choice(len(dataset), size, replace=False)))
    predictor, _ = fit_predictor(mixed, **options)
    result = {"size": int(size), "augmented": evaluate(predictor, validation)}
    result["single"] = {}
    for name in names:
        rows = dataset.for_model(name)
        rows = rows.subset(np.arange(min(size, len(rows))))
        predictor, _ = fit_predictor(rows, **options)
        result["single"][name] = evaluate(predictor, validation)
    logger.info(
        "Pose comparison on %d row(s): augmented %.4g, best single %.4g",
        size,
        result["augmented"],
        min(result["single"].values()),
    )
    return result

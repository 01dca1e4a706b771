from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from django.conf import settings

from .enums import LabelSource
from .network import ResidualNet

PROCESS_FIELDS = (
    "h_n",
    "S_section",
    "T_n",
    "grad_T",
    "V_F",
    "d",
)


@dataclass(frozen=True)
class ProcessParams:
    """Printer settings appended to every layer feature row."""

    nozzle_temperature: float
    temperature_gradient: float
    velocity: float
    layer_thickness: float

    @classmethod
    def default(cls):
        bounds = settings.GRASPPRINT["BOUNDS"]
        printer = settings.GRASPPRINT["PRINTER"]
        return cls(
            nozzle_temperature=float(np.mean(bounds["nozzle_temperature"])),
            temperature_gradient=0.0,
            velocity=printer["feed_velocity"],
            layer_thickness=settings.GRASPPRINT["LAYER_THICKNESS"],
        )

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "scale", np.asarray(self.scale, dtype=float))

    @classmethod
    def fit(cls, values):
        values = np.asarray(values, dtype=float)
        scale = values.std(axis=0)
        scale = np.where(scale > 1e-12, scale, 1.0)
        return cls(values.mean(axis=0), scale)

    @classmethod
    def identity(cls, width=None):
        if width is None:
            return cls(0.0, 1.0)
        return cls(np.zeros(width), np.ones(width))

    def transform(self, values):
        return (np.asarray(values, dtype=float) - self.mean) / self.scale

    def inverse(self, values):
        return np.asarray(values, dtype=float) * self.scale + self.mean

    def to_dict(self):
        return {
            "mean": np.atleast_1d(self.mean).tolist(),
            "scale": np.atleast_1d(self.scale).tolist(),
        }

    @classmethod
    def from_dict(cls, data, scalar=False):
        if scalar:
            return cls(data["mean"][0], data["scale"][0])
        return cls(data["mean"], data["scale"])


@dataclass
class EnergyPredictor:
    """A trained network together with its input/target standardization."""

    net: ResidualNet
    inputs: Standardizer
    targets: Standardizer

    def predict(self, features):
        features = np.atleast_2d(np.asarray(features, dtype=float))
        return self.targets.inverse(self.net(self.inputs.transform(features)))

    def to_dict(self):
        return {
            "network": self.net.to_dict(),
            "input_standardizer": self.inputs.to_dict(),
            "target_standardizer": self.targets.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            net=ResidualNet.from_dict(data["network"]),
            inputs=Standardizer.from_dict(data["input_standardizer"]),
            targets=Standardizer.from_dict(data["target_standardizer"], scalar=True),
        )


@dataclass
class TrainState:
    """SGD hyperparameters plus the loss history of one training run."""

    net: ResidualNet
    learning_rate: float
    batch_size: int
    epochs: int
    seed: int = 0
    losses: list = field(default_factory=list)
    validation_losses: list = field(default_factory=list)

    @classmethod
    def for_network(cls, net, **overrides):
        config = settings.GRASPPRINT
        values = {
            "learning_rate": config["LEARNING_RATE"],
            "batch_size": config["BATCH_SIZE"],
            "epochs": config["EPOCHS"],
            "seed": config["SEED"],
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(net=net, **values)


@dataclass(frozen=True)
class Dataset:
    """
    Per-layer samples: feature rows, energy labels (kJ) and their origin.

    ``features`` ends with the PROCESS_FIELDS columns. ``model`` names the
    morphed model (schedule) a row came from.
    """

    features: np.ndarray
    labels: np.ndarray
    sources: tuple
    models: tuple
    layers: tuple

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        features = features.reshape(len(self.labels), -1)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=float))
        object.__setattr__(
            self, "sources", tuple(LabelSource(s) for s in self.sources)
        )
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "layers", tuple(int(i) for i in self.layers))
        if not len(self.sources) == len(self.models) == len(self.layers) == len(
            self.labels
        ):
            raise ValueError("Dataset columns have different lengths.")

    def __len__(self):
        return len(self.labels)

    @classmethod
    def concatenate(cls, datasets):
        datasets = [d for d in datasets if len(d)]
        if not datasets:
            raise ValueError("Nothing to concatenate.")
        return cls(
            features=np.vstack([d.features for d in datasets]),
            labels=np.concatenate([d.labels for d in datasets]),
            sources=sum((d.sources for d in datasets), ()),
            models=sum((d.models for d in datasets), ()),
            layers=sum((d.layers for d in datasets), ()),
        )

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[indices],
            labels=self.labels[indices],
            sources=[self.sources[i] for i in indices],
            models=[self.models[i] for i in indices],
            layers=[self.layers[i] for i in indices],
        )

    def for_model(self, name):
        return self.subset([i for i, m in enumerate(self.models) if m == name])

    @property
    def model_names(self):
        return tuple(dict.fromkeys(self.models))

    @property
    def is_pseudo(self):
        return np.array([s == LabelSource.PSEUDO for s in self.sources])

    def column(self, name):
        """A PROCESS_FIELDS column by name."""
        offset = len(PROCESS_FIELDS) - PROCESS_FIELDS.index(name)
        return self.features[:, -offset]

    def sample_weights(self, pseudo_weight=None):
        if pseudo_weight is None:
            pseudo_weight = settings.GRASPPRINT["PSEUDO_WEIGHT"]
        return np.where(self.is_pseudo, pseudo_weight, 1.0)


@dataclass(frozen=True)
class PredictionReport:
    """Per-layer predicted and analytic energies of one model."""

    model: str
    heights: np.ndarray
    predicted: np.ndarray
    theoretical: np.ndarray

    def _extremes(self, values):
        values = np.asarray(values, dtype=float)
        low, high = int(np.argmin(values)), int(np.argmax(values))
        return {
            "min": float(values[low]),
            "min_h_n": float(self.heights[low]),
            "max": float(values[high]),
            "max_h_n": float(self.heights[high]),
            "mean": float(values.mean()),
            "sum": float(values.sum()),
        }

    def to_dict(self):
        return {
            "model": self.model,
            "predicted": self._extremes(self.predicted),
            "theoretical": self._extremes(self.theoretical),
            "layers": [
                {"h_n": float(h), "predicted": float(p), "theoretical": float(t)}
                for h, p, t in zip(self.heights, self.predicted, self.theoretical)
            ],
        }

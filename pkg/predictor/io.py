import csv
import json
from pathlib import Path

import numpy as np

from .domain import PROCESS_FIELDS, Dataset, EnergyPredictor
from .enums import LabelSource


def save_checkpoint(predictor, path):
    Path(path).write_text(json.dumps(predictor.to_dict(), indent=2))
    return Path(path)


def load_checkpoint(path):
    return EnergyPredictor.from_dict(json.loads(Path(path).read_text()))


def dataset_columns(width):
    mask_columns = [f"f{i}" for i in range(width - len(PROCESS_FIELDS))]
    return mask_columns + list(PROCESS_FIELDS)


def write_dataset(dataset, path):
    """Feature columns, then label (kJ), is_pseudo, model and layer."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            dataset_columns(dataset.features.shape[1])
            + ["label", "is_pseudo", "model", "layer"]
        )
        for row, label, source, model, layer in zip(
            dataset.features,
            dataset.labels,
            dataset.sources,
            dataset.models,
            dataset.layers,
        ):
            writer.writerow(
                [*row.tolist(), float(label), int(source == LabelSource.PSEUDO)]
                + [model, layer]
            )
    return Path(path)


def read_dataset(path):
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        columns = [
            c
            for c in reader.fieldnames or []
            if c not in ("label", "is_pseudo", "model", "layer")
        ]
        features, labels, sources, models, layers = [], [], [], [], []
        for line, row in enumerate(reader, start=2):
            try:
                features.append([float(row[c]) for c in columns])
                labels.append(float(row["label"]))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{Path(path).name}:{line}: bad dataset row ({exc})")
            pseudo = row["is_pseudo"] == "1"
            sources.append(LabelSource.PSEUDO if pseudo else LabelSource.MEASURED)
            models.append(row["model"])
            layers.append(int(row["layer"]))
    return Dataset(
        features=np.array(features).reshape(len(labels), len(columns)),
        labels=labels,
        sources=sources,
        models=models,
        layers=layers,
    )


def write_loss_curve(state, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch", "loss", "validation_loss"])
        for epoch, loss in enumerate(state.losses):
            validation = (
                state.validation_losses[epoch]
                if epoch < len(state.validation_losses)
                else ""
            )
            writer.writerow([epoch, loss, validation])
    return Path(path)

import csv
import json
from pathlib import Path

import numpy as np
from PIL import Image


def write_mask_pgm(lcm, path):
    """Binary PGM (P5), 255 for solid pixels."""
    image = Image.fromarray((np.asarray(lcm.mask) * 255).astype(np.uint8))
    image.save(path, format="PPM")
    return Path(path)


def read_mask_pgm(path):
    with Image.open(path) as image:
        return (np.asarray(image.convert("L")) > 127).astype(np.uint8)


def write_mask_csv(lcm, path):
    np.savetxt(path, np.asarray(lcm.mask), fmt="%d", delimiter=",")
    return Path(path)


def write_layers_json(stack, path):
    payload = {
        "thickness": stack.thickness,
        "frame": list(stack.frame),
        "layers": [layer.to_dict() for layer in stack],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return Path(path)


def write_layer_json(layer, path):
    Path(path).write_text(json.dumps(layer.to_dict(), indent=2, sort_keys=True) + "\n")
    return Path(path)


TOOLPATH_HEADER = ["layer", "segment", "x0", "y0", "x1", "y1"]


def _segment_rows(layer_index, metrics):
    for i, (start, end) in enumerate(metrics.segments):
        yield [layer_index, i, *start, *end]


def write_toolpath_csv(metrics, path, layer_index=0):
    """One row per linked infill segment, in path order."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TOOLPATH_HEADER)
        writer.writerows(_segment_rows(layer_index, metrics))
    return Path(path)


def export_layers(stack, directory, *, masks=(), toolpaths=()):
    """
    Write a slice run into ``directory``: layers.json, one JSON per layer under
    layers/, one PGM and one CSV per mask and a single toolpaths.csv covering
    every layer.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = [write_layers_json(stack, directory / "layers.json")]
    layer_dir = directory / "layers"
    layer_dir.mkdir(exist_ok=True)
    for layer in stack:
        path = layer_dir / f"layer_{layer.index:04d}.json"
        written.append(write_layer_json(layer, path))
    mask_dir = directory / "masks"
    if masks:
        mask_dir.mkdir(exist_ok=True)
    for layer, lcm in zip(stack, masks):
        written.append(write_mask_pgm(lcm, mask_dir / f"layer_{layer.index:04d}.pgm"))
        written.append(write_mask_csv(lcm, mask_dir / f"layer_{layer.index:04d}.csv"))
    if toolpaths:
        path = directory / "toolpaths.csv"
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(TOOLPATH_HEADER)
            for layer, metrics in zip(stack, toolpaths):
                writer.writerows(_segment_rows(layer.index, metrics))
        written.append(path)
    return written

import json
from pathlib import Path

import numpy as np


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def to_json(data):
    return json.dumps(data, indent=2, sort_keys=True, default=_jsonable)


def write_json(path, data):
    """Sorted, indented JSON so reruns produce identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(data) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())

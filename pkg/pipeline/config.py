import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from django.conf import settings

BUILTIN = "builtin:"
BUILTIN_HAND = "builtin:hand"
BUILTIN_MESHES = ("hand", "cube", "icosphere", "square_tube", "table")


def default_config():
    """Effective defaults, taken from settings.GRASPPRINT."""
    config = settings.GRASPPRINT
    return {
        "mesh": BUILTIN_HAND,
        "hand": BUILTIN_HAND,
        "schedules": ["builtin:claws", "builtin:capisce"],
        "constraints": None,
        "material": dict(config["MATERIAL"]),
        "printer": dict(config["PRINTER"]),
        "bounds": copy.deepcopy(config["BOUNDS"]),
        "grasp_space": {
            "max_ellipsoids": config["MAX_ELLIPSOIDS"],
            "envelope_eps": config["ENVELOPE_EPS"],
            "samples": config["UNION_SAMPLES"],
        },
        "morph": {"weight_mode": "uniform"},
        "slicer": {
            "thickness": config["LAYER_THICKNESS"],
            "resolution": config["MASK_RESOLUTION"],
            "pattern": "line",
            "spacing": config["INFILL_SPACING"],
            "overhang_threshold": config["OVERHANG_THRESHOLD"],
            "support_density": config["SUPPORT_DENSITY"],
        },
        "process": {
            "nozzle_temperature": sum(config["BOUNDS"]["nozzle_temperature"]) / 2,
            "temperature_gradient": 0.0,
            "velocity": config["PRINTER"]["feed_velocity"],
        },
        "training": {
            "hidden": config["HIDDEN_WIDTH"],
            "blocks": config["RESIDUAL_BLOCKS"],
            "learning_rate": config["LEARNING_RATE"],
            "batch_size": config["BATCH_SIZE"],
            "epochs": config["EPOCHS"],
            "pseudo_weight": config["PSEUDO_WEIGHT"],
            "label_target": "total",
            "all_poses": True,
            "compare": False,
        },
        "ga": {
            "population": config["POPULATION"],
            "generations": config["GENERATIONS"],
            "workers": 1,
        },
        "power_logs": {},
        "output": "runs/latest",
        "seed": config["SEED"],
    }


def merge(base, overrides):
    """Recursive dict merge; ``overrides`` wins, None values are skipped."""
    merged = copy.deepcopy(base)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


@dataclass(frozen=True)
class RunConfig:
    mesh: str
    hand: str
    schedules: list
    constraints: str | None
    material: dict
    printer: dict
    bounds: dict
    grasp_space: dict
    morph: dict
    slicer: dict
    process: dict
    training: dict
    ga: dict
    power_logs: dict = field(default_factory=dict)
    output: str = "runs/latest"
    seed: int = 0

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self):
        return asdict(self)

    @property
    def hash(self):
        """SHA-256 of the canonical sorted-key JSON of every setting."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @property
    def output_dir(self):
        return Path(self.output)

    @property
    def uses_builtin_hand(self):
        return self.hand == BUILTIN_HAND

    @property
    def has_hand(self):
        """False when the builtin hand is paired with some other mesh."""
        return bool(self.hand) and (
            not self.uses_builtin_hand or self.mesh == BUILTIN_HAND
        )


def read_config_file(path):
    path = Path(path)
    data = json.loads(path.read_text())
    if not isinstance(data, dict):
        raise ValueError(f"{path.name}: run config must be a JSON object.")
    return data


def load_run_config(path=None, overrides=None):
    """
    Defaults, then the JSON file at ``path``, then ``overrides``.

    Unknown top-level keys are kept so validation can report them.
    """
    data = default_config()
    if path:
        data = merge(data, read_config_file(path))
    return merge(data, overrides)

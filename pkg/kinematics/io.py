import csv
import json
from pathlib import Path

import numpy as np

from .domain import KinematicChain
from .hand import GraspSchedule, HandModel


def chain_from_dict(name, data):
    return KinematicChain(
        links=data["links"], base=data.get("base", np.eye(4).tolist()), name=name
    )


def hand_to_dict(hand):
    """DH tables per finger and the frame each bound vertex follows."""
    return {
        "fingers": {name: chain.to_dict() for name, chain in hand.chains.items()},
        "bindings": [
            {
                "finger": binding.finger,
                "frame": binding.frame,
                "vertices": binding.vertices.tolist(),
            }
            for binding in hand.bindings
        ],
    }


def hand_from_dict(data, vertices=None):
    """
    Rebuild a HandModel. Bindings need the rest-pose mesh ``vertices`` to
    compute the local offsets; without them only the chains are loaded.
    """
    chains = {
        name: chain_from_dict(name, chain) for name, chain in data["fingers"].items()
    }
    if vertices is None or not data.get("bindings"):
        return HandModel(chains)
    groups = [(b["finger"], b["frame"], b["vertices"]) for b in data["bindings"]]
    return HandModel.bind(chains, vertices, groups)


def load_hand(path, vertices=None):
    with open(path) as handle:
        return hand_from_dict(json.load(handle), vertices)


def dump_hand(hand, path):
    Path(path).write_text(json.dumps(hand_to_dict(hand), indent=2, sort_keys=True))
    return path


def load_schedule(path, name=None):
    """
    Read a joint-angle schedule CSV.

    Columns: ``t`` (s) then one ``finger.joint`` column per joint, angles in
    radians, one row per time sample.
    """
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        columns = [c for c in reader.fieldnames or [] if c != "t"]
        times, rows = [], []
        for line, row in enumerate(reader, start=2):
            try:
                times.append(float(row["t"]))
                rows.append([float(row[c]) for c in columns])
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path.name}:{line}: bad schedule row ({exc})")
    if not rows:
        raise ValueError(f"{path.name}: schedule has no samples.")
    return GraspSchedule(name or path.stem, times, columns, rows)


def dump_schedule(schedule, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", *schedule.columns])
        for t, row in zip(schedule.times, schedule.angles):
            writer.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
    return path

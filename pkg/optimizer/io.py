import csv
import json
from pathlib import Path

import numpy as np

from .enums import Objective


def _objective_names(count):
    return list(Objective.values) if count == 3 else [f"f{i}" for i in range(count)]


def write_front(front, path, members=None):
    """Decision values, objectives, violation, rank, crowding and extras."""
    members = front.members if members is None else members
    count = len(members[0].objectives) if members else 3
    extras = sorted({key for m in members for key in m.evaluation.extras})
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            list(front.bounds.names)
            + _objective_names(count)
            + ["violation", "rank", "crowding"]
            + extras
        )
        for member in members:
            writer.writerow(
                member.x.tolist()
                + list(member.objectives)
                + [member.evaluation.violation, member.rank, member.crowding]
                + [member.evaluation.extras.get(key, "") for key in extras]
            )
    return Path(path)


def write_history(front, path):
    count = len(front.reference_point)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["generation"]
            + [f"best_{name}" for name in _objective_names(count)]
            + ["hypervolume", "feasible"]
        )
        for stats in front.history:
            best = list(stats.best) or [""] * count
            writer.writerow(
                [stats.generation] + best + [stats.hypervolume, stats.feasible]
            )
    return Path(path)


def load_ga_settings(path):
    """GA settings JSON: population, generations, bounds (name -> [lo, hi])."""
    data = json.loads(Path(path).read_text())
    if "bounds" in data:
        data["bounds"] = {
            name: np.asarray(pair, dtype=float).tolist()
            for name, pair in data["bounds"].items()
        }
    return data

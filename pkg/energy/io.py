import csv
import json
from pathlib import Path

from .domain import MaterialParams, PowerLog
from .exceptions import PowerLogError

LOG_COLUMNS = ("t_seconds", "watts")


def load_power_log(path):
    """Read a power-analyzer export with ``t_seconds`` and ``watts`` columns."""
    path = Path(path)
    times, powers = [], []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in LOG_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise PowerLogError(0, f"{path.name} lacks column(s) {', '.join(missing)}")
        for index, row in enumerate(reader):
            try:
                times.append(float(row["t_seconds"]))
                powers.append(float(row["watts"]))
            except (TypeError, ValueError):
                raise PowerLogError(index, f"unreadable row in {path.name}")
    return PowerLog(times, powers)


def dump_power_log(log, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(LOG_COLUMNS)
        writer.writerows(zip(log.times.tolist(), log.powers.tolist()))
    return Path(path)


def load_material(path):
    return MaterialParams.from_dict(json.loads(Path(path).read_text()))


def dump_material(material, path):
    Path(path).write_text(json.dumps(material.to_dict(), indent=2, sort_keys=True))
    return Path(path)


def write_report(report, path):
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return Path(path)

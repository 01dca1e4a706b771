import argparse
import logging
import time
from pathlib import Path

import django
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError
from django.utils import timezone

from .config import load_run_config
from .enums import RunStatus
from .io import to_json, write_json
from .models import RunRecord
from .services import RunContext, run_stage
from .validators import validate_run_config

logger = logging.getLogger(__name__)


def _dest(option):
    return option.lstrip("-").replace("-", "_")


def _named_path(value):
    name, separator, path = value.partition("=")
    if not separator or not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got '{value}'")
    return name, path


class StageCommand(BaseCommand):
    """
    Base for the stage commands.

    Loads the run config (defaults, then ``--config``, then flags), validates
    it, runs ``stage`` and writes ``manifest.json`` into the output directory.
    On failure an ``error_report.json`` is written there instead and the
    command exits non-zero.

    ``flags`` lists (option, config path, argparse kwargs); a flag that is
    given overrides the config value at that path.
    """

    stage = None
    flags = ()
    accepts_power_logs = False
    # config key the positional argument overrides; None means it is a config
    source_key = "mesh"
    source_help = "Mesh file (STL or OBJ) or builtin:<name>."

    def get_version(self):
        return f"graspprint {settings.VERSION} (Django {django.get_version()})"

    def add_arguments(self, parser):
        parser.add_argument("source", nargs="?", help=self.source_help)
        parser.add_argument(
            "--config",
            default=settings.GRASPPRINT["CONFIG_PATH"] or None,
            help="Run config JSON (default: $GRASPPRINT_CONFIG).",
        )
        parser.add_argument(
            "--seed", type=int, help="Seed for every stochastic component."
        )
        parser.add_argument("--out", help="Output directory for this run.")
        for option, _, kwargs in self.flags:
            parser.add_argument(option, dest=_dest(option), **kwargs)
        if self.accepts_power_logs:
            parser.add_argument(
                "--power-log",
                action="append",
                type=_named_path,
                metavar="NAME=CSV",
                help="Measured power log (t_seconds, watts) of the named model.",
            )

    def overrides(self, options):
        overrides = {"seed": options.get("seed"), "output": options.get("out")}
        if self.source_key and options.get("source"):
            overrides[self.source_key] = options["source"]
        for option, path, _ in self.flags:
            value = options.get(_dest(option))
            if value is None:
                continue
            node = overrides
            for key in path[:-1]:
                node = node.setdefault(key, {})
            node[path[-1]] = value
        if options.get("power_log"):
            overrides["power_logs"] = dict(options["power_log"])
        return overrides

    def context(self, config, options):
        return RunContext(
            config,
            checkpoint=options.get("checkpoint"),
            dataset=options.get("dataset"),
        )

    def handle(self, *args, **options):
        started = time.perf_counter()
        config_path = options.get("config")
        if self.source_key is None and options.get("source"):
            config_path = options["source"]
        try:
            data = load_run_config(config_path, self.overrides(options))
        except (OSError, ValueError) as exc:
            raise CommandError(f"Cannot read run config '{config_path}': {exc}")

        output = Path(data.get("output") or "runs/latest")
        try:
            config = validate_run_config(data, self.stage)
        except ValidationError as exc:
            self.report_error(output, exc, messages=exc.messages)

        record = self.open_record(config)
        try:
            result = run_stage(self.stage, self.context(config, options), output)
        except Exception as exc:
            messages = getattr(exc, "messages", [str(exc)])
            self.close_record(record, RunStatus.FAILED, error=str(exc))
            self.report_error(output, exc, messages=messages, config=config)

        manifest = {
            "stage": self.stage.value,
            "version": settings.VERSION,
            "inputs": {
                "config": config_path,
                "mesh": config.mesh,
                "hand": config.hand,
                "schedules": list(config.schedules),
                "constraints": config.constraints,
                "power_logs": dict(config.power_logs),
            },
            "config_hash": config.hash,
            "seed": config.seed,
            "outputs": sorted(
                str(Path(path).relative_to(output)) for path in result.outputs
            ),
            "timings": {**result.timings, "total": time.perf_counter() - started},
            "summary": result.summary,
        }
        write_json(output / "manifest.json", manifest)
        (output / "error_report.json").unlink(missing_ok=True)
        self.close_record(record, RunStatus.SUCCEEDED, manifest=manifest)

        self.stdout.write(to_json(result.summary))
        self.stdout.write(
            self.style.SUCCESS(
                f"{self.stage.value}: {len(result.outputs)} file(s) written to "
                f"{output}"
            )
        )

    def report_error(self, output, exc, *, messages, config=None):
        report = {
            "stage": self.stage.value,
            "error": type(exc).__name__,
            "messages": list(messages),
            "config_hash": None if config is None else config.hash,
        }
        path = write_json(output / "error_report.json", report)
        for message in messages:
            self.stderr.write(self.style.ERROR(f"  {message}"))
        raise CommandError(
            f"{self.stage.value} failed ({type(exc).__name__}); see {path}"
        ) from exc

    def open_record(self, config):
        try:
            return RunRecord.objects.create(
                stage=self.stage,
                config_hash=config.hash,
                seed=config.seed,
                output_dir=str(config.output_dir),
            )
        except DatabaseError as exc:
            logger.warning("Run record not stored: %s", exc)
            return None

    def close_record(self, record, status, *, manifest=None, error=""):
        if record is None:
            return
        record.status = status
        record.manifest = manifest or {}
        record.error = error
        record.finished_at = timezone.now()
        try:
            record.save()
        except DatabaseError as exc:
            logger.warning("Run record %s not updated: %s", record.pk, exc)

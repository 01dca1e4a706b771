"""
Tests for the pipeline app: run config, stage commands and run records
"""

import csv
import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.db import DatabaseError
from django.test import SimpleTestCase, TestCase

from meshes.management.commands.measure import Command as MeasureCommand
from meshes.primitives import unit_cube
from meshes.services import export_mesh
from morphing.services import load_constraints
from pipeline.config import default_config, load_run_config, merge
from pipeline.enums import RunStatus, Stage
from pipeline.models import RunRecord
from pipeline.selectors import latest_successful, recent_runs, runs_for_config
from pipeline.services import split_dataset
from pipeline.validators import validate_run_config
from predictor.domain import Dataset
from predictor.enums import LabelSource

TINY_RUN = {
    "grasp_space": {"max_ellipsoids": 4, "samples": 2000},
    "slicer": {"thickness": 5.0, "resolution": 8, "spacing": 5.0},
    "training": {"epochs": 5, "hidden": 8, "blocks": 1, "batch_size": 8},
    "ga": {"population": 8, "generations": 1},
    "bounds": {"layer_thickness": [2.0, 5.0]},
}


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class RunConfigTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_merge_is_recursive(self):
        base = {"slicer": {"thickness": 1.0, "resolution": 32}, "seed": 1}
        merged = merge(base, {"slicer": {"thickness": 0.5}, "seed": None})
        expected = {"slicer": {"thickness": 0.5, "resolution": 32}, "seed": 1}
        self.assertEqual(merged, expected)
        self.assertEqual(base["slicer"]["thickness"], 1.0)

    def test_file_then_flags(self):
        path = self.root / "run.json"
        path.write_text(json.dumps({"slicer": {"thickness": 0.5}, "seed": 9}))
        data = load_run_config(path, {"seed": 3})
        self.assertEqual(data["slicer"]["thickness"], 0.5)
        self.assertEqual(data["slicer"]["resolution"], 32)
        self.assertEqual(data["seed"], 3)

    def test_config_must_be_an_object(self):
        path = self.root / "list.json"
        path.write_text("[1, 2]")
        with self.assertRaises(ValueError):
            load_run_config(path)

    def test_defaults_validate_and_hash(self):
        config = validate_run_config(default_config(), Stage.PIPELINE)
        self.assertEqual(config.mesh, "builtin:hand")
        self.assertEqual(len(config.hash), 64)
        self.assertEqual(config.hash, validate_run_config(default_config()).hash)
        reseeded = validate_run_config({**default_config(), "seed": 1})
        self.assertNotEqual(config.hash, reseeded.hash)

    def test_every_error_is_listed(self):
        data = merge(
            default_config(),
            {
                "bogus": 1,
                "slicer": {"thickness": -1.0, "pattern": "honeycomb"},
                "ga": {"population": 5},
                "material": {"density": 0.0},
            },
        )
        data["seed"] = "forty-two"
        with self.assertRaises(ValidationError) as caught:
            validate_run_config(data)
        messages = caught.exception.messages
        self.assertIn("bogus: unknown setting.", messages)
        self.assertIn("seed: must be an integer.", messages)
        for prefix in ("slicer.thickness", "slicer.pattern", "ga.population"):
            self.assertTrue(any(m.startswith(prefix) for m in messages), prefix)
        self.assertTrue(any(m.startswith("material") for m in messages))

    def test_builtin_hand_needs_builtin_mesh(self):
        data = {**default_config(), "mesh": "builtin:cube"}
        validate_run_config(data, Stage.SLICE)
        with self.assertRaisesMessage(ValidationError, "builtin:hand"):
            validate_run_config(data, Stage.MORPH)

    def test_missing_files(self):
        data = {
            **default_config(),
            "mesh": str(self.root / "missing.stl"),
            "schedules": ["builtin:wave"],
            "power_logs": {"claws": str(self.root / "missing.csv")},
        }
        with self.assertRaises(ValidationError) as caught:
            validate_run_config(data)
        self.assertEqual(len(caught.exception.messages), 3)


class SplitTests(SimpleTestCase):
    def test_seeded_split(self):
        features = np.arange(20.0).reshape(10, 2)
        dataset = Dataset(
            features=features,
            labels=features.sum(axis=1),
            sources=[LabelSource.PSEUDO] * 10,
            models=["a"] * 10,
            layers=range(10),
        )
        train, validation = split_dataset(dataset, seed=4)
        self.assertEqual((len(train), len(validation)), (8, 2))
        self.assertFalse(set(train.layers) & set(validation.layers))
        again, _ = split_dataset(dataset, seed=4)
        self.assertEqual(train.layers, again.layers)
        whole, none = split_dataset(dataset.subset([0, 1]), seed=4)
        self.assertIsNone(none)
        self.assertEqual(len(whole), 2)


class StageCommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def call(self, name, *args, **options):
        return call_command(
            name, *args, stdout=StringIO(), stderr=StringIO(), **options
        )

    def test_measure_exported_cube(self):
        path = export_mesh(unit_cube(), self.root / "cube.stl")
        out = self.root / "measure"
        self.call("measure", str(path), out=str(out))
        report = json.loads((out / "measure.json").read_text())
        self.assertAlmostEqual(report["surface_area"], 6.0, places=9)
        self.assertAlmostEqual(report["volume"], 1.0, places=9)
        self.assertTrue(report["closed"])
        self.assertTrue(report["fits_print_space"])

        manifest = json.loads((out / "manifest.json").read_text())
        self.assertEqual(manifest["stage"], "measure")
        self.assertEqual(manifest["outputs"], ["measure.json"])
        record = RunRecord.objects.get()
        self.assertEqual(record.status, RunStatus.SUCCEEDED)
        self.assertEqual(record.config_hash, manifest["config_hash"])
        self.assertIsNotNone(record.finished_at)

    def test_slice_cube(self):
        out = self.root / "slice"
        self.call("slice", "builtin:cube", thickness=0.25, resolution=8, out=str(out))
        layers = sorted((out / "layers").glob("layer_*.json"))
        self.assertEqual([p.name for p in layers][-1], "layer_0003.json")
        self.assertEqual(len(layers), 4)
        self.assertEqual(len(list((out / "masks").glob("*.pgm"))), 4)
        manifest = json.loads((out / "manifest.json").read_text())
        self.assertEqual(manifest["summary"]["layers"], 4)
        self.assertIn("supports.json", manifest["outputs"])

    def test_invalid_config_writes_error_report(self):
        out = self.root / "bad"
        with self.assertRaises(CommandError):
            self.call("slice", "builtin:cube", thickness=-1.0, out=str(out))
        report = json.loads((out / "error_report.json").read_text())
        self.assertEqual(report["error"], "ValidationError")
        self.assertTrue(any("slicer.thickness" in m for m in report["messages"]))
        self.assertFalse(RunRecord.objects.exists())

    def test_failed_stage_is_recorded(self):
        out = self.root / "tall"
        with self.assertRaises(CommandError):
            self.call("slice", "builtin:cube", thickness=2.0, out=str(out))
        report = json.loads((out / "error_report.json").read_text())
        self.assertEqual(report["error"], "ValueError")
        self.assertIsNotNone(report["config_hash"])
        self.assertFalse((out / "manifest.json").exists())
        self.assertEqual(RunRecord.objects.get().status, RunStatus.FAILED)

    def test_unreadable_config(self):
        path = self.root / "broken.json"
        path.write_text("{not json")
        with self.assertRaisesMessage(CommandError, "Cannot read run config"):
            self.call("measure", "builtin:cube", config=str(path))

    def test_run_without_database(self):
        out = self.root / "nodb"
        create = patch(
            "pipeline.stage.RunRecord.objects.create",
            side_effect=DatabaseError("unavailable"),
        )
        with create, self.assertLogs("pipeline.stage", "WARNING") as logs:
            self.call("measure", "builtin:cube", out=str(out))
        self.assertIn("Run record not stored", logs.output[0])
        self.assertTrue((out / "manifest.json").exists())

    def test_version(self):
        self.assertTrue(MeasureCommand().get_version().startswith("graspprint 1.0.0"))

    def test_export_hand_round_trip(self):
        out = self.root / "hand"
        self.call("export_hand", out=str(out))
        for name in ("hand.obj", "hand.json", "claws.csv", "capisce.csv"):
            self.assertTrue((out / name).is_file(), name)

        config = json.loads((out / "run_config.json").read_text())
        self.assertEqual(config["mesh"], str(out / "hand.obj"))
        self.call("measure", config=str(out / "run_config.json"), out=str(out / "m"))
        self.call("measure", "builtin:hand", out=str(out / "builtin"))
        exported = json.loads((out / "m" / "measure.json").read_text())
        builtin = json.loads((out / "builtin" / "measure.json").read_text())
        self.assertAlmostEqual(
            exported["volume"], builtin["volume"], delta=1e-4 * builtin["volume"]
        )


class PipelineRunTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        self.config = self.root / "tiny.json"
        self.config.write_text(json.dumps(TINY_RUN))

    def run_pipeline(self, name):
        out = self.root / name
        call_command(
            "pipeline",
            str(self.config),
            seed=5,
            out=str(out),
            stdout=StringIO(),
            stderr=StringIO(),
        )
        return out

    def test_reruns_repeat_and_stay_in_bounds(self):
        first = self.run_pipeline("first")
        second = self.run_pipeline("second")
        for stage in ("measure", "fgs", "morph", "slice", "energy", "train"):
            self.assertTrue((first / stage).is_dir(), stage)
        controls = sorted((first / "morph").glob("*_controls.json"))
        self.assertTrue(controls)
        for path in controls:
            name = path.name.removesuffix("_controls.json")
            self.assertTrue((first / "morph" / f"{name}.obj").is_file(), name)
            self.assertTrue(load_constraints(path))
        for name in (
            "energy/energy.csv",
            "train/checkpoint.json",
            "predict/predictions.csv",
            "optimize/population.csv",
        ):
            self.assertEqual(
                (first / name).read_bytes(), (second / name).read_bytes(), name
            )

        manifests = [
            json.loads((run / "manifest.json").read_text()) for run in (first, second)
        ]
        for manifest in manifests:
            manifest.pop("timings")
            # the output directory is part of the hashed config
            manifest.pop("config_hash")
        self.assertEqual(manifests[0], manifests[1])
        summary = manifests[0]["summary"]
        self.assertEqual(summary["optimize"]["energy_source"], "predictor")

        rows = read_csv(first / "optimize" / "population.csv")
        self.assertEqual(len(rows), 8)
        for row in rows:
            self.assertTrue(2.0 <= float(row["layer_thickness"]) <= 5.0)
            self.assertTrue(483.15 <= float(row["nozzle_temperature"]) <= 513.15)
        runs = RunRecord.objects.filter(stage=Stage.PIPELINE)
        self.assertEqual(runs.filter(status=RunStatus.SUCCEEDED).count(), 2)


class RunRecordTests(TestCase):
    def setUp(self):
        self.measured = RunRecord.objects.create(
            stage=Stage.MEASURE,
            status=RunStatus.SUCCEEDED,
            config_hash="a" * 64,
            seed=1,
            output_dir="runs/a",
        )
        self.failed = RunRecord.objects.create(
            stage=Stage.SLICE,
            status=RunStatus.FAILED,
            config_hash="b" * 64,
            seed=1,
            output_dir="runs/b",
            error="too thick",
        )

    def test_str(self):
        self.assertEqual(str(self.measured), "measure [succeeded] aaaaaaaaaaaa")

    def test_selectors(self):
        self.assertEqual(len(recent_runs()), 2)
        self.assertEqual(list(recent_runs(Stage.SLICE)), [self.failed])
        self.assertEqual(list(runs_for_config("a" * 64)), [self.measured])
        self.assertEqual(latest_successful(Stage.MEASURE), self.measured)
        self.assertIsNone(latest_successful(Stage.SLICE))

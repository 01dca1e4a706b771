import csv
import logging
import time
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError

from energy.domain import MaterialParams
from energy.io import load_power_log
from energy.services import (
    analytic_energy,
    boundary_segments,
    geometric_error,
    integrate_power,
    stack_deviation,
)
from grasp_space.services import build_grasp_space
from kinematics.io import dump_hand, dump_schedule, load_hand, load_schedule
from meshes.primitives import icosphere, square_tube, table, unit_cube
from meshes.services import export_mesh, fits_print_space, load_mesh, measure, volume
from morphing.services import (
    build_laplacian,
    dump_constraints,
    load_constraints,
    morph_by_grasp,
)
from optimizer.evaluation import GraspPrintEvaluator, decision_bounds
from optimizer.io import write_front, write_history
from optimizer.services import nsga2
from predictor.augmentation import augment_and_label, measured_labels, schedule_poses
from predictor.domain import ProcessParams
from predictor.io import (
    load_checkpoint,
    read_dataset,
    save_checkpoint,
    write_dataset,
    write_loss_curve,
)
from predictor.services import (
    compare_pose_training,
    evaluate,
    fit_predictor,
    predict_model,
)
from slicer.exports import export_layers
from slicer.masks import rasterize_lcm
from slicer.services import slice_mesh
from slicer.supports import support_stats
from slicer.toolpaths import infill

from .assets import grasp_schedule, synthetic_hand
from .config import BUILTIN
from .enums import Stage
from .io import write_json

logger = logging.getLogger(__name__)

MESH_FACTORIES = {
    "hand": lambda: synthetic_hand()[0],
    "cube": unit_cube,
    "icosphere": icosphere,
    "square_tube": square_tube,
    "table": table,
}
VALIDATION_SHARE = 0.2


@dataclass
class StageResult:
    """Files a stage wrote plus the summary that goes into the manifest."""

    outputs: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)


def split_dataset(dataset, share=VALIDATION_SHARE, seed=0):
    """Seeded (training, validation) split; validation is None when too small."""
    count = int(round(len(dataset) * share))
    if count == 0 or count == len(dataset):
        return dataset, None
    order = np.random.default_rng(seed).permutation(len(dataset))
    return (
        dataset.subset(np.sort(order[count:])),
        dataset.subset(np.sort(order[:count])),
    )


class RunContext:
    """
    Inputs shared by the stages of one run, built on first use.

    Stages chained by ``run_pipeline`` reuse the same grasp space, morphs,
    dataset and trained predictor instead of rebuilding them.
    """

    def __init__(self, config, *, checkpoint=None, dataset=None):
        self.config = config
        self.checkpoint = checkpoint
        self.dataset_path = dataset

    @cached_property
    def mesh(self):
        source = self.config.mesh
        if source.startswith(BUILTIN):
            return MESH_FACTORIES[source[len(BUILTIN) :]]()
        return load_mesh(source)

    @cached_property
    def hand(self):
        if not self.config.has_hand:
            raise ValidationError(
                "hand: the builtin hand only binds the builtin:hand mesh."
            )
        if self.config.uses_builtin_hand:
            return synthetic_hand()[1]
        return load_hand(self.config.hand, self.mesh.vertices)

    @cached_property
    def schedules(self):
        return [
            (
                grasp_schedule(source[len(BUILTIN) :])
                if source.startswith(BUILTIN)
                else load_schedule(source)
            )
            for source in self.config.schedules
        ]

    @cached_property
    def material(self):
        return MaterialParams.from_dict(self.config.material)

    @cached_property
    def process(self):
        process = self.config.process
        return ProcessParams(
            nozzle_temperature=float(process["nozzle_temperature"]),
            temperature_gradient=float(process["temperature_gradient"]),
            velocity=float(process["velocity"]),
            layer_thickness=float(self.config.slicer["thickness"]),
        )

    @cached_property
    def logs(self):
        return {
            name: load_power_log(path)
            for name, path in sorted(self.config.power_logs.items())
        }

    @cached_property
    def space(self):
        options = self.config.grasp_space
        reach = None
        if self.config.has_hand and self.schedules:
            poses = [pose for schedule in self.schedules for pose in schedule.poses()]
            reach = self.hand.swept_points(poses)
        return build_grasp_space(
            self.mesh,
            options["max_ellipsoids"],
            options["envelope_eps"],
            reach_points=reach,
            seed=self.config.seed,
            samples=options["samples"],
        )

    @cached_property
    def system(self):
        return build_laplacian(self.mesh, self.config.morph["weight_mode"])

    def morph(self, name, targets):
        result = morph_by_grasp(self.mesh, self.space, targets, system=self.system)
        return self.mesh.with_vertices(result.vertices, name=name), result

    @cached_property
    def morph_controls(self):
        """{name: {vertex: target}} per final grasp and constraint file."""
        controls = {}
        if self.config.has_hand:
            for schedule in self.schedules:
                for name, pose in schedule_poses(schedule):
                    controls[name] = self.hand.targets(pose)
        if self.config.constraints:
            controls["constraints"] = load_constraints(self.config.constraints)
        return controls

    @cached_property
    def morphs(self):
        """{name: (morphed mesh, MorphResult)} per entry of ``morph_controls``."""
        return {
            name: self.morph(name, targets)
            for name, targets in self.morph_controls.items()
        }

    @cached_property
    def dataset(self):
        if self.dataset_path:
            return read_dataset(self.dataset_path)
        training = self.config.training
        return augment_and_label(
            self.mesh,
            self.hand,
            self.schedules,
            self.material,
            self.process,
            space=self.space,
            logs=self.logs,
            label_target=training["label_target"],
            resolution=self.config.slicer["resolution"],
            all_poses=training["all_poses"],
            weight_mode=self.config.morph["weight_mode"],
        )

    @cached_property
    def split(self):
        return split_dataset(self.dataset, seed=self.config.seed)

    @property
    def training_options(self):
        training = self.config.training
        options = {
            key: training[key]
            for key in ("hidden", "blocks", "learning_rate", "batch_size", "epochs")
        }
        return {**options, "seed": self.config.seed}

    @cached_property
    def training(self):
        """(EnergyPredictor, TrainState) fitted on the training split."""
        train_set, validation = self.split
        return fit_predictor(
            train_set,
            validation,
            pseudo_weight=self.config.training["pseudo_weight"],
            **self.training_options,
        )

    @cached_property
    def predictor(self):
        if self.checkpoint:
            return load_checkpoint(self.checkpoint)
        return self.training[0]

    @property
    def trained_predictor(self):
        """The checkpoint or an already fitted predictor, never a fresh fit."""
        if self.checkpoint or "training" in self.__dict__:
            return self.predictor
        return None


def run_measure(context, directory):
    mesh = context.mesh
    measurements = measure(mesh, require_closed=False)
    print_space = context.config.printer["print_space"]
    report = {
        "mesh": mesh.name,
        "vertices": mesh.vertex_count,
        "faces": mesh.face_count,
        "closed": mesh.is_closed,
        "print_space": print_space,
        "fits_print_space": fits_print_space(mesh.aabb, print_space),
        **measurements.to_dict(),
    }
    path = write_json(directory / "measure.json", report)
    summary = {
        "surface_area": measurements.surface_area,
        "volume": measurements.volume,
    }
    return StageResult([path], summary)


def run_fgs(context, directory):
    space = context.space
    path = write_json(directory / "grasp_space.json", space.to_dict())
    summary = {
        "ellipsoids": len(space.ellipsoids),
        "envelope_error": space.envelope_error,
        "complete": space.is_complete,
        "volume": space.volume,
    }
    return StageResult([path], summary)


def run_morph(context, directory):
    outputs, report = [], {}
    for name, (model, result) in context.morphs.items():
        outputs.append(export_mesh(model, directory / f"{name}.obj"))
        path = directory / f"{name}_controls.json"
        outputs.append(dump_constraints(context.morph_controls[name], path))
        report[name] = {**result.to_dict(), "volume": volume(model)}
    outputs.append(write_json(directory / "morph.json", report))
    summary = {name: entry["energy"] for name, entry in report.items()}
    return StageResult(outputs, summary)


def run_slice(context, directory):
    slicer = context.config.slicer
    mesh = context.mesh
    stack = slice_mesh(mesh, slicer["thickness"])
    masks = [rasterize_lcm(layer, stack.frame, slicer["resolution"]) for layer in stack]
    line_width = context.config.printer["line_width"]
    toolpaths = [
        infill(layer, slicer["pattern"], slicer["spacing"], line_width=line_width)
        for layer in stack
    ]
    supports = support_stats(
        mesh, slicer["overhang_threshold"], slicer["support_density"]
    )

    outputs = export_layers(stack, directory, masks=masks, toolpaths=toolpaths)
    infill_rows = [
        {"index": layer.index, "h_n": layer.normalized_height, **metrics.to_dict()}
        for layer, metrics in zip(stack, toolpaths)
    ]
    outputs.append(write_json(directory / "infill.json", infill_rows))
    outputs.append(write_json(directory / "supports.json", supports.to_dict()))
    summary = {
        "layers": len(stack),
        "section_volume": stack.section_volume,
        "L_T": sum(metrics.length for metrics in toolpaths),
        "supports": len(supports),
    }
    return StageResult(outputs, summary)


ENERGY_COLUMNS = [
    "model",
    "E_melting",
    "t_T",
    "E_motion",
    "E_analytic",
    "E_total",
    "epsilon_geometric",
]


def model_energy(context, model):
    """EnergyReport and geometric error of one model at the run's settings."""
    printer = context.config.printer
    process = context.process
    stack = slice_mesh(model, process.layer_thickness)
    report = analytic_energy(
        context.material,
        volume(model),
        infill_rate=printer["infill_rate"],
        velocity=process.velocity,
        working_power=printer["working_power"],
        nozzle_temperature=process.nozzle_temperature,
        layer_thickness=process.layer_thickness,
        line_width=printer["line_width"],
    )
    log = context.logs.get(model.name)
    if log is not None:
        report = replace(
            report,
            measured=integrate_power(log),
            layers=tuple(measured_labels(stack, log).tolist()),
        )
    deviations = stack_deviation(
        stack, process.temperature_gradient, process.layer_thickness
    )
    layer_sizes = [len(boundary_segments(layer)[0]) for layer in stack]
    error = geometric_error(deviations, layer_sizes) if len(deviations) else None
    return report, error


def run_energy(context, directory):
    models = [context.mesh] + [model for model, _ in context.morphs.values()]
    report = {}
    for model in models:
        energy, error = model_energy(context, model)
        report[model.name] = {
            **energy.to_dict(),
            "geometric_error": None if error is None else error.to_dict(),
        }

    path = directory / "energy.csv"
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(ENERGY_COLUMNS)
        for name, entry in report.items():
            error = entry["geometric_error"]
            writer.writerow(
                [name]
                + [entry[column] for column in ENERGY_COLUMNS[1:-2]]
                + ["" if entry["E_total"] is None else entry["E_total"]]
                + [0.0 if error is None else error["value"]]
            )
    outputs = [write_json(directory / "energy.json", report), path]
    summary = {name: entry["E_analytic"] for name, entry in report.items()}
    return StageResult(outputs, summary)


def run_train(context, directory):
    predictor, state = context.training
    train_set, validation = context.split
    dataset = context.dataset
    outputs = [
        write_dataset(dataset, directory / "dataset.csv"),
        save_checkpoint(predictor, directory / "checkpoint.json"),
        write_loss_curve(state, directory / "loss_curve.csv"),
    ]
    summary = {
        "samples": len(dataset),
        "pseudo_labels": int(dataset.is_pseudo.sum()),
        "models": list(dataset.model_names),
        "training_loss": state.losses[-1] if state.losses else None,
        "validation_loss": (
            None if validation is None else float(evaluate(predictor, validation))
        ),
    }
    if context.config.training.get("compare"):
        if validation is None or len(train_set.model_names) < 2:
            logger.warning("Skipping pose comparison: needs two poses and a split.")
        else:
            comparison = compare_pose_training(
                train_set, validation, **context.training_options
            )
            outputs.append(write_json(directory / "comparison.json", comparison))
            summary["comparison"] = comparison
    return StageResult(outputs, summary)


def run_predict(context, directory):
    predictor = context.predictor
    dataset = context.dataset
    reports = [predict_model(predictor, dataset, name) for name in dataset.model_names]

    path = directory / "predictions.csv"
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model", "layer", "h_n", "predicted", "theoretical"])
        for report in reports:
            rows = zip(report.heights, report.predicted, report.theoretical)
            for layer, (h_n, predicted, theoretical) in enumerate(rows):
                writer.writerow(
                    [report.model, layer, float(h_n), float(predicted)]
                    + [float(theoretical)]
                )
    payload = {report.model: report.to_dict() for report in reports}
    outputs = [write_json(directory / "predictions.json", payload), path]
    summary = {
        name: {
            "predicted": entry["predicted"]["sum"],
            "theoretical": entry["theoretical"]["sum"],
        }
        for name, entry in payload.items()
    }
    return StageResult(outputs, summary)


def run_optimize(context, directory):
    config = context.config
    bounds = decision_bounds(context.hand, context.schedules, config.bounds)
    predictor = context.trained_predictor
    evaluator = GraspPrintEvaluator(
        context.mesh,
        context.hand,
        context.space,
        context.material,
        bounds,
        predictor=predictor,
        printer=config.printer,
        resolution=config.slicer["resolution"],
    )
    ga = config.ga
    front = nsga2(
        evaluator,
        bounds,
        ga["population"],
        ga["generations"],
        config.seed,
        workers=ga["workers"],
    )
    outputs = [
        write_front(front, directory / "population.csv"),
        write_front(front, directory / "front.csv", members=front.feasible_front),
        write_history(front, directory / "history.csv"),
    ]
    summary = {
        "front": len(front.feasible_front),
        "hypervolume": front.history[-1].hypervolume,
        "reference_point": list(front.reference_point),
        "energy_source": "predictor" if predictor is not None else "analytic",
    }
    return StageResult(outputs, summary)


PIPELINE_STAGES = (
    Stage.MEASURE,
    Stage.FGS,
    Stage.MORPH,
    Stage.SLICE,
    Stage.ENERGY,
    Stage.TRAIN,
    Stage.PREDICT,
    Stage.OPTIMIZE,
)


def run_pipeline(context, directory):
    """Every stage in order, each writing into its own subdirectory."""
    result = StageResult()
    for stage in PIPELINE_STAGES:
        started = time.perf_counter()
        part = run_stage(stage, context, Path(directory) / stage.value)
        result.outputs.extend(part.outputs)
        result.summary[stage.value] = part.summary
        result.timings[stage.value] = time.perf_counter() - started
        logger.info("Stage %s done in %.2f s", stage.value, result.timings[stage.value])
    return result


def run_export_hand(context, directory):
    """Hand mesh, DH tables with bindings, schedules and a config using them."""
    mesh_path = export_mesh(context.mesh, directory / "hand.obj")
    hand_path = dump_hand(context.hand, directory / "hand.json")
    schedule_paths = [
        dump_schedule(schedule, directory / f"{schedule.name}.csv")
        for schedule in context.schedules
    ]
    config = {
        **context.config.to_dict(),
        "mesh": str(mesh_path),
        "hand": str(hand_path),
        "schedules": [str(path) for path in schedule_paths],
    }
    config_path = write_json(directory / "run_config.json", config)
    outputs = [mesh_path, hand_path, *schedule_paths, config_path]
    summary = {
        "vertices": context.mesh.vertex_count,
        "joints": context.hand.joint_count,
        "schedules": [schedule.name for schedule in context.schedules],
    }
    return StageResult([Path(path) for path in outputs], summary)


STAGE_RUNNERS = {
    Stage.MEASURE: run_measure,
    Stage.FGS: run_fgs,
    Stage.MORPH: run_morph,
    Stage.SLICE: run_slice,
    Stage.ENERGY: run_energy,
    Stage.TRAIN: run_train,
    Stage.PREDICT: run_predict,
    Stage.OPTIMIZE: run_optimize,
    Stage.PIPELINE: run_pipeline,
    Stage.EXPORT_HAND: run_export_hand,
}


def run_stage(stage, context, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return STAGE_RUNNERS[Stage(stage)](context, directory)

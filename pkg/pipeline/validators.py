from pathlib import Path

from django.core.exceptions import ValidationError

from energy.validators import validate_material
from meshes.validators import validate_mesh_source, validate_print_space
from morphing.enums import WeightMode
from optimizer.validators import validate_population, validate_process_bounds
from predictor.enums import LabelTarget
from predictor.validators import validate_training_options
from slicer.validators import (
    validate_infill_pattern,
    validate_layer_thickness,
    validate_mask_resolution,
    validate_overhang_threshold,
    validate_spacing,
)

from .assets import SCHEDULES
from .config import BUILTIN, BUILTIN_HAND, BUILTIN_MESHES, RunConfig, default_config
from .enums import Stage

HAND_STAGES = {
    Stage.MORPH,
    Stage.TRAIN,
    Stage.OPTIMIZE,
    Stage.PIPELINE,
    Stage.EXPORT_HAND,
}


def _collect(errors, prefix, check, *args):
    try:
        check(*args)
    except ValidationError as exc:
        errors.extend(f"{prefix}: {message}" for message in exc.messages)
    except (KeyError, TypeError, ValueError) as exc:
        errors.append(f"{prefix}: {exc}")


def _existing_file(errors, prefix, value):
    if not value or not Path(value).is_file():
        errors.append(f"{prefix}: file '{value}' does not exist.")


def validate_run_config(data, stage=None):
    """
    Check a merged run-config dict and return a RunConfig.

    Stages that pose the hand (see HAND_STAGES) also need a hand that binds
    the configured mesh.

    Raises:
        ValidationError: listing every violation found.
    """
    errors = []
    known = set(default_config())
    for key in sorted(set(data) - known):
        errors.append(f"{key}: unknown setting.")

    _collect(errors, "mesh", validate_mesh_source, data.get("mesh"))
    mesh = str(data.get("mesh") or "")
    if mesh.startswith(BUILTIN) and mesh[len(BUILTIN) :] not in BUILTIN_MESHES:
        errors.append(f"mesh: unknown builtin mesh '{mesh}'.")
    hand = data.get("hand")
    if hand != BUILTIN_HAND:
        _existing_file(errors, "hand", hand)
    elif stage in HAND_STAGES and data.get("mesh") != BUILTIN_HAND:
        errors.append("hand: the builtin hand only binds the builtin:hand mesh.")
    for schedule in data.get("schedules") or []:
        if str(schedule).startswith(BUILTIN):
            if schedule[len(BUILTIN) :] not in SCHEDULES:
                errors.append(f"schedules: unknown builtin schedule '{schedule}'.")
        else:
            _existing_file(errors, "schedules", schedule)
    if data.get("constraints"):
        _existing_file(errors, "constraints", data["constraints"])
    for name, path in (data.get("power_logs") or {}).items():
        _existing_file(errors, f"power_logs.{name}", path)

    _collect(errors, "material", validate_material, data.get("material"))
    printer = data.get("printer") or {}
    _collect(
        errors, "printer.print_space", validate_print_space, printer.get("print_space")
    )
    for key in ("line_width", "working_power", "feed_velocity"):
        if not isinstance(printer.get(key), (int, float)) or printer[key] <= 0:
            errors.append(f"printer.{key}: must be a positive number.")
    rate = printer.get("infill_rate")
    if not isinstance(rate, (int, float)) or not 0 < rate <= 1:
        errors.append("printer.infill_rate: must lie in (0, 1].")
    _collect(errors, "bounds", validate_process_bounds, data.get("bounds") or {})

    slicer = data.get("slicer") or {}
    for key, check in (
        ("thickness", validate_layer_thickness),
        ("resolution", validate_mask_resolution),
        ("pattern", validate_infill_pattern),
        ("spacing", validate_spacing),
        ("overhang_threshold", validate_overhang_threshold),
    ):
        _collect(errors, f"slicer.{key}", check, slicer.get(key))
    if (slicer.get("support_density") or 0) < 0:
        errors.append("slicer.support_density: must be non-negative.")

    space = data.get("grasp_space") or {}
    if int(space.get("max_ellipsoids") or 0) < 1:
        errors.append("grasp_space.max_ellipsoids: must be at least 1.")
    if (space.get("envelope_eps") or 0) <= 0:
        errors.append("grasp_space.envelope_eps: must be positive.")
    if (data.get("morph") or {}).get("weight_mode") not in WeightMode.values:
        errors.append(f"morph.weight_mode: choose from {', '.join(WeightMode.values)}.")

    process = data.get("process") or {}
    if (process.get("velocity") or 0) <= 0:
        errors.append("process.velocity: must be positive.")
    if (process.get("temperature_gradient") or 0) < 0:
        errors.append("process.temperature_gradient: must be non-negative.")

    training = data.get("training") or {}
    _collect(errors, "training", validate_training_options, training)
    if training.get("label_target") not in LabelTarget.values:
        errors.append(
            f"training.label_target: choose from {', '.join(LabelTarget.values)}."
        )
    ga = data.get("ga") or {}
    _collect(errors, "ga.population", validate_population, ga.get("population"))
    if int(ga.get("generations") or 0) < 0:
        errors.append("ga.generations: must be non-negative.")
    if not isinstance(data.get("seed"), int):
        errors.append("seed: must be an integer.")

    if errors:
        raise ValidationError(errors)
    return RunConfig.from_dict(data)

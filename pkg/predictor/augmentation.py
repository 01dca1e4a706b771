import logging

import numpy as np
from django.conf import settings

from energy.services import analytic_energy, layer_energies_from_log
from grasp_space.services import build_grasp_space
from meshes.services import volume
from morphing.enums import WeightMode
from morphing.exceptions import MorphError
from morphing.services import build_laplacian, morph_by_grasp
from slicer.services import slice_mesh

from .domain import Dataset, ProcessParams
from .enums import LabelSource, LabelTarget
from .exceptions import PredictorError
from .features import stack_features

logger = logging.getLogger(__name__)


def apportion(total, stack):
    """Split ``total`` over layers in proportion to S_section * d."""
    shares = np.array([layer.section_area for layer in stack]) * stack.thickness
    if shares.sum() <= 0:
        raise PredictorError("Layers carry no solid cross-section to apportion over.")
    return total * shares / shares.sum()


def pseudo_labels(mesh, stack, material, process, target=LabelTarget.TOTAL):
    """Analytic energy of the whole model spread over its layers."""
    report = analytic_energy(
        material,
        volume(mesh),
        velocity=process.velocity,
        nozzle_temperature=process.nozzle_temperature,
        layer_thickness=process.layer_thickness,
    )
    total = report.melting if target == LabelTarget.MELTING else report.total
    return apportion(total, stack)


def measured_labels(stack, log):
    """Per-layer energies from a power log, aligned by section-area time share."""
    times = np.clip([layer.section_area for layer in stack], 0.0, None)
    return layer_energies_from_log(log, times)


def schedule_poses(schedule, all_poses=False):
    """(model name, pose) pairs: the final grasp, or every sample of it."""
    if not all_poses:
        return [(schedule.name, schedule.pose(len(schedule) - 1))]
    return [(f"{schedule.name}@{i}", pose) for i, pose in enumerate(schedule.poses())]


def augment_and_label(
    mesh,
    hand,
    schedules,
    material,
    process=None,
    *,
    space=None,
    logs=None,
    label_target=LabelTarget.TOTAL,
    resolution=None,
    all_poses=False,
    weight_mode=WeightMode.UNIFORM,
):
    """
    Morph ``mesh`` into each schedule's grasp, slice it and label its layers.

    A model whose name appears in ``logs`` ({name: PowerLog}) gets measured
    labels; every other model gets analytic pseudo-labels.

    Raises:
        MorphError: with ``schedule`` set to the failing model name.
    """
    process = process or ProcessParams.default()
    logs = logs or {}
    resolution = resolution or settings.GRASPPRINT["MASK_RESOLUTION"]
    if space is None:
        poses = [pose for schedule in schedules for pose in schedule.poses()]
        space = build_grasp_space(mesh, reach_points=hand.swept_points(poses))
    system = build_laplacian(mesh, weight_mode)

    datasets = []
    for schedule in schedules:
        for name, pose in schedule_poses(schedule, all_poses):
            try:
                result = morph_by_grasp(mesh, space, hand.targets(pose), system=system)
            except MorphError as exc:
                exc.schedule = name
                logger.error("Morph for schedule '%s' failed: %s", name, exc)
                raise
            model = mesh.with_vertices(result.vertices, name=name)
            stack = slice_mesh(model, process.layer_thickness)
            features = stack_features(stack, process, resolution=resolution)
            if name in logs:
                labels = measured_labels(stack, logs[name])
                source = LabelSource.MEASURED
            else:
                labels = pseudo_labels(model, stack, material, process, label_target)
                source = LabelSource.PSEUDO
            datasets.append(
                Dataset(
                    features=features,
                    labels=labels,
                    sources=[source] * len(labels),
                    models=[name] * len(labels),
                    layers=[layer.index for layer in stack],
                )
            )
            logger.info(
                "Model %s: E(V')=%.4g, %d layer(s), %s labels",
                name,
                result.energy,
                len(stack),
                source,
            )
    return Dataset.concatenate(datasets)

import logging
import threading

import numpy as np
from django.conf import settings

from energy.services import analytic_energy, geometric_error, stack_deviation
from meshes.services import volume
from morphing.exceptions import MorphError
from morphing.services import build_laplacian, morph_by_grasp
from predictor.domain import ProcessParams
from predictor.features import stack_features
from slicer.services import slice_mesh

from .domain import Bounds, DecisionVector, Evaluation
from .enums import ProcessVariable

logger = logging.getLogger(__name__)

OBJECTIVES = 3
FGS_TOLERANCE = 1e-9


def decision_bounds(hand, schedules=(), process_bounds=None):
    """
    Box for [joint angles..., T_n, grad T, V_F, d].

    Each joint ranges over the angles its grasp schedules visit (its rest
    angle included), so poses stay in the region the grasp space covers.
    Process bounds default to settings.GRASPPRINT["BOUNDS"].
    """
    process_bounds = process_bounds or settings.GRASPPRINT["BOUNDS"]
    rest = hand.pose_vector(hand.rest_pose())
    low, high = rest.copy(), rest.copy()
    for schedule in schedules:
        for pose in schedule.poses():
            angles = hand.pose_vector(pose)
            low, high = np.minimum(low, angles), np.maximum(high, angles)
    pairs = [process_bounds[name] for name in ProcessVariable.values]
    return Bounds(
        lower=np.concatenate([low, [p[0] for p in pairs]]),
        upper=np.concatenate([high, [p[1] for p in pairs]]),
        names=tuple(hand.joint_names) + tuple(ProcessVariable.values),
    )


class GraspPrintEvaluator:
    """
    Objective triple (E_total, E(V'), epsilon_geometric) of a decision vector.

    The joint angles pose the hand; its bound vertices become morph targets
    that must stay inside ``space``. The morphed model is sliced at d and its
    energy comes from ``predictor`` (summed per-layer predictions) or, without
    one, from the analytic model. Results are cached on a quantized grid.
    """

    def __init__(
        self,
        mesh,
        hand,
        space,
        material,
        bounds,
        *,
        predictor=None,
        printer=None,
        thermal_coefficient=None,
        resolution=None,
        cache_grid=None,
    ):
        self.mesh = mesh
        self.hand = hand
        self.space = space
        self.material = material
        self.bounds = bounds
        self.predictor = predictor
        self.printer = printer or settings.GRASPPRINT["PRINTER"]
        self.thermal_coefficient = thermal_coefficient
        self.resolution = resolution
        self.cache_grid = cache_grid or settings.GRASPPRINT["CACHE_GRID"]
        self.system = build_laplacian(mesh)
        self.cache = {}
        self.hits = 0
        self._lock = threading.Lock()

    def _key(self, x):
        return tuple(np.round(np.asarray(x) / self.cache_grid).astype(np.int64))

    def __call__(self, x):
        key = self._key(x)
        with self._lock:
            if key in self.cache:
                self.hits += 1
                return self.cache[key]
        evaluation = self.evaluate(x)
        with self._lock:
            self.cache[key] = evaluation
        return evaluation

    def fgs_violation(self, targets):
        points = np.array(list(targets.values())).reshape(-1, 3)
        if not len(points):
            return 0.0
        excess = self.space.quadratic_forms(points).min(axis=0) - 1.0
        return float(np.clip(excess - FGS_TOLERANCE, 0.0, None).sum())

    def evaluate(self, x):
        if not self.bounds.contains(x):
            raise ValueError("Decision vector lies outside the bounds.")
        decision = DecisionVector.from_array(x, self.hand.joint_count)
        targets = self.hand.targets(self.hand.pose_from_vector(decision.joint_angles))
        violation = self.fgs_violation(targets)
        if violation > 0:
            return Evaluation.infeasible(OBJECTIVES, violation, "target outside FGS")
        try:
            result = morph_by_grasp(self.mesh, self.space, targets, system=self.system)
        except MorphError as exc:
            logger.debug("Candidate infeasible: %s", exc)
            return Evaluation.infeasible(OBJECTIVES, np.inf, str(exc))

        model = self.mesh.with_vertices(result.vertices)
        stack = slice_mesh(model, decision.layer_thickness)
        report = analytic_energy(
            self.material,
            volume(model),
            infill_rate=self.printer["infill_rate"],
            velocity=decision.velocity,
            working_power=self.printer["working_power"],
            line_width=self.printer["line_width"],
            nozzle_temperature=decision.nozzle_temperature,
            layer_thickness=decision.layer_thickness,
        )
        if self.predictor is not None:
            process = ProcessParams(
                nozzle_temperature=decision.nozzle_temperature,
                temperature_gradient=decision.temperature_gradient,
                velocity=decision.velocity,
                layer_thickness=decision.layer_thickness,
            )
            features = stack_features(stack, process, resolution=self.resolution)
            energy = float(np.sum(self.predictor.predict(features)))
        else:
            energy = report.total

        deviations = stack_deviation(
            stack,
            decision.temperature_gradient,
            decision.layer_thickness,
            self.thermal_coefficient,
        )
        epsilon = geometric_error(deviations).value if len(deviations) else 0.0
        return Evaluation(
            objectives=(energy, result.energy, epsilon),
            extras={"t_T": report.print_time, "E_melting": report.melting},
        )

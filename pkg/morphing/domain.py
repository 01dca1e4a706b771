from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.sparse import csr_array, vstack

from .enums import WeightMode
from .exceptions import ConstraintConflictError

FREE, ANCHOR, CONTROL = 0, 1, 2


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _split(constraints, rest):
    """Normalise {index: xyz} or an index iterable into (indices, positions)."""
    if constraints is None:
        return np.zeros(0, dtype=np.int64), np.zeros((0, 3))
    if isinstance(constraints, dict):
        items = sorted((int(k), v) for k, v in constraints.items())
        indices = np.array([k for k, _ in items], dtype=np.int64)
        positions = np.array([v for _, v in items], dtype=float).reshape(-1, 3)
        return indices, positions
    indices = np.unique(np.asarray(list(constraints), dtype=np.int64))
    return indices, rest[indices]


@dataclass(frozen=True)
class MorphSystem:
    """
    Laplacian system of a mesh plus its positional constraints.

    Row i of ``laplacian`` is delta_i = V_i - sum_j w_ij V_j. Anchors pin
    vertices to u_i, controls drive vertices to V*; both enter the
    least-squares system as identity rows scaled by ``constraint_weight``.
    """

    vertices: np.ndarray
    laplacian: csr_array
    weights: csr_array
    deltas: np.ndarray
    weight_mode: str = WeightMode.UNIFORM
    constraint_weight: float = 1.0
    anchor_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    anchor_positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    control_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    control_targets: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices).reshape(-1, 3))
        object.__setattr__(self, "deltas", _frozen(self.deltas).reshape(-1, 3))
        for name in ("anchor_indices", "control_indices"):
            object.__setattr__(self, name, _frozen(getattr(self, name), np.int64))
        for name in ("anchor_positions", "control_targets"):
            positions = _frozen(getattr(self, name)).reshape(-1, 3)
            object.__setattr__(self, name, positions)
        n = self.vertex_count
        for indices in (self.anchor_indices, self.control_indices):
            if len(indices) and (indices.min() < 0 or indices.max() >= n):
                raise ValueError("Constraint vertex index out of range.")
        clash = np.intersect1d(self.anchor_indices, self.control_indices)
        if len(clash):
            raise ConstraintConflictError(clash)

    @property
    def vertex_count(self):
        return len(self.vertices)

    @property
    def anchors(self):
        return dict(zip(self.anchor_indices.tolist(), self.anchor_positions))

    @property
    def controls(self):
        return dict(zip(self.control_indices.tolist(), self.control_targets))

    @property
    def constraint_count(self):
        return len(self.anchor_indices) + len(self.control_indices)

    def with_constraints(self, anchors=None, controls=None, constraint_weight=None):
        """
        Copy with new constraints.

        ``anchors`` may be a {vertex: position} map or a plain index list, in
        which case the rest positions are used.
        """
        anchor_indices, anchor_positions = _split(anchors, self.vertices)
        control_indices, control_targets = _split(controls, self.vertices)
        return replace(
            self,
            anchor_indices=anchor_indices,
            anchor_positions=anchor_positions,
            control_indices=control_indices,
            control_targets=control_targets,
            constraint_weight=(
                self.constraint_weight
                if constraint_weight is None
                else float(constraint_weight)
            ),
        )

    @cached_property
    def roles(self):
        """FREE, ANCHOR or CONTROL per vertex."""
        roles = np.full(self.vertex_count, FREE, dtype=np.int8)
        roles[self.anchor_indices] = ANCHOR
        roles[self.control_indices] = CONTROL
        return roles

    @cached_property
    def constraint_indices(self):
        return np.concatenate([self.anchor_indices, self.control_indices])

    @cached_property
    def constraint_positions(self):
        return np.vstack([self.anchor_positions, self.control_targets])

    @cached_property
    def selection(self):
        """(0 | I) rows picking the constrained vertices."""
        k = len(self.constraint_indices)
        return csr_array(
            (np.ones(k), (np.arange(k), self.constraint_indices)),
            shape=(k, self.vertex_count),
        )

    @cached_property
    def stacked_matrix(self):
        return vstack(
            [self.laplacian, self.constraint_weight * self.selection], format="csr"
        )

    @cached_property
    def stacked_rhs(self):
        return np.vstack(
            [self.deltas, self.constraint_weight * self.constraint_positions]
        )


@dataclass(frozen=True)
class MorphResult:
    vertices: np.ndarray
    energy: float
    residual: float
    laplacian_energy: float = 0.0
    constraint_energy: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices).reshape(-1, 3))

    def to_dict(self):
        return {
            "energy": self.energy,
            "laplacian_energy": self.laplacian_energy,
            "constraint_energy": self.constraint_energy,
            "residual": self.residual,
            "vertex_count": len(self.vertices),
        }

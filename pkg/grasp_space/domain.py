from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ObliqueEllipsoid:
    """
    Ellipsoid {x : (x - P_s)^T A (x - P_s) <= 1}.

    ``shape`` is the symmetric positive-definite matrix A (mm^-2). The
    principal frame is exposed as a Z-Y-X rotation R with A = R^T Q R,
    Q = diag(x_r^-2, y_r^-2, z_r^-2).
    """

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center).reshape(3))
        shape = _frozen(self.shape).reshape(3, 3)
        object.__setattr__(self, "shape", _frozen((shape + shape.T) / 2.0))

    @classmethod
    def from_parameters(cls, center, semi_axes, angles):
        from .services import rotation_zyx

        rotation = rotation_zyx(angles)
        q = np.diag(1.0 / np.asarray(semi_axes, dtype=float) ** 2)
        return cls(center, rotation.T @ q @ rotation)

    @cached_property
    def principal(self):
        from .services import decompose

        return decompose(self)

    @property
    def semi_axes(self):
        return self.principal.semi_axes

    @property
    def angles(self):
        return self.principal.angles

    @property
    def rotation(self):
        return self.principal.rotation

    @property
    def volume(self):
        return float(4.0 / 3.0 * np.pi / np.sqrt(np.linalg.det(self.shape)))

    @cached_property
    def half_extents(self):
        """Half widths of the axis-aligned box enclosing the ellipsoid."""
        return np.sqrt(np.diag(np.linalg.inv(self.shape)))

    def quadratic_form(self, points):
        offset = np.asarray(points, dtype=float).reshape(-1, 3) - self.center
        return np.einsum("ij,jk,ik->i", offset, self.shape, offset)

    def contains(self, points, tolerance=1e-9):
        return self.quadratic_form(points) <= 1.0 + tolerance

    def transformed(self, rotation, translation):
        rotation = np.asarray(rotation, dtype=float)
        return ObliqueEllipsoid(
            rotation @ self.center + np.asarray(translation, dtype=float),
            rotation @ self.shape @ rotation.T,
        )

    def to_dict(self):
        return {
            "center": self.center.tolist(),
            "semi_axes": self.semi_axes.tolist(),
            "angles": self.angles.tolist(),
            "A": self.shape.reshape(-1).tolist(),
        }


@dataclass(frozen=True)
class PrincipalAxes:
    semi_axes: np.ndarray
    angles: np.ndarray
    rotation: np.ndarray

    def reconstruct(self):
        q = np.diag(1.0 / self.semi_axes**2)
        return self.rotation.T @ q @ self.rotation


@dataclass(frozen=True)
class GraspSpace:
    """Flexible grasping space: a union of oblique ellipsoids over the facets."""

    ellipsoids: tuple
    facet_cover: np.ndarray
    envelope_error: float
    centroid: np.ndarray
    surface_area: float
    volume: float
    uncovered_faces: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "ellipsoids", tuple(self.ellipsoids))
        object.__setattr__(self, "facet_cover", _frozen(self.facet_cover, np.int64))
        object.__setattr__(self, "centroid", _frozen(self.centroid))
        object.__setattr__(
            self, "uncovered_faces", tuple(int(f) for f in self.uncovered_faces)
        )

    @property
    def is_complete(self):
        return not self.uncovered_faces

    def quadratic_forms(self, points):
        """(n_ellipsoids, n_points) matrix of containment quadratic forms."""
        return np.vstack([e.quadratic_form(points) for e in self.ellipsoids])

    def contains(self, points, tolerance=1e-9):
        return self.quadratic_forms(points).min(axis=0) <= 1.0 + tolerance

    def membership(self, points, tolerance=1e-9):
        """Index of the tightest containing ellipsoid per point, -1 if none."""
        forms = self.quadratic_forms(points)
        best = forms.argmin(axis=0)
        inside = forms.min(axis=0) <= 1.0 + tolerance
        return np.where(inside, best, -1)

    def violation(self, points):
        """Sum over points of how far outside the union each one lies."""
        if len(np.asarray(points).reshape(-1, 3)) == 0:
            return 0.0
        excess = self.quadratic_forms(points).min(axis=0) - 1.0
        return float(np.clip(excess, 0.0, None).sum())

    def to_dict(self):
        return {
            "ellipsoids": [e.to_dict() for e in self.ellipsoids],
            "facet_cover": self.facet_cover.tolist(),
            "uncovered_faces": list(self.uncovered_faces),
            "envelope_error": self.envelope_error,
            "centroid": self.centroid.tolist(),
            "surface_area": self.surface_area,
            "volume": self.volume,
            "complete": self.is_complete,
        }

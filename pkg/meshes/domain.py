from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csgraph, csr_array


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned bounding box in millimetres."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "minimum", _frozen(self.minimum, float))
        object.__setattr__(self, "maximum", _frozen(self.maximum, float))
        if np.any(self.minimum > self.maximum):
            raise ValueError("Bounding box minimum exceeds maximum.")

    @classmethod
    def of_points(cls, points):
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        return cls(points.min(axis=0), points.max(axis=0))

    @property
    def strokes(self):
        """x_b, y_b, z_b."""
        return self.maximum - self.minimum

    @property
    def center(self):
        return (self.minimum + self.maximum) / 2.0

    @property
    def diagonal(self):
        return float(np.linalg.norm(self.strokes))

    @property
    def volume(self):
        return float(np.prod(self.strokes))

    def union(self, other):
        return BoundingBox(
            np.minimum(self.minimum, other.minimum),
            np.maximum(self.maximum, other.maximum),
        )

    def to_dict(self):
        return {
            "min": self.minimum.tolist(),
            "max": self.maximum.tolist(),
            "strokes": self.strokes.tolist(),
            "center": self.center.tolist(),
            "diagonal": self.diagonal,
        }


@dataclass(frozen=True)
class Mesh:
    """Indexed triangle mesh, faces wound CCW when seen from outside.

    Instances are immutable; derived quantities are cached on first use.
    """

    vertices: np.ndarray
    faces: np.ndarray
    name: str = field(default="mesh", compare=False)

    def __post_init__(self):
        vertices = _frozen(self.vertices, float).reshape(-1, 3)
        faces = _frozen(self.faces, np.int64).reshape(-1, 3)
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise ValueError("Face index out of range.")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)

    def __len__(self):
        return len(self.vertices)

    @property
    def vertex_count(self):
        return len(self.vertices)

    @property
    def face_count(self):
        return len(self.faces)

    def with_vertices(self, vertices, name=None):
        """Same connectivity, new positions (used for morphed variants)."""
        return Mesh(vertices, self.faces, name=name or self.name)

    def flipped(self):
        return Mesh(self.vertices, self.faces[:, ::-1], name=self.name)

    @cached_property
    def triangles(self):
        return self.vertices[self.faces]

    @cached_property
    def face_cross(self):
        tri = self.triangles
        return np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])

    @cached_property
    def face_areas(self):
        return 0.5 * np.linalg.norm(self.face_cross, axis=1)

    @cached_property
    def face_normals(self):
        norms = np.linalg.norm(self.face_cross, axis=1, keepdims=True)
        return np.divide(
            self.face_cross, norms, out=np.zeros_like(self.face_cross), where=norms > 0
        )

    @cached_property
    def face_centroids(self):
        return self.triangles.mean(axis=1)

    @cached_property
    def _edge_table(self):
        directed = np.concatenate(
            [self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]
        )
        undirected = np.sort(directed, axis=1)
        edges, counts = np.unique(undirected, axis=0, return_counts=True)
        return edges.reshape(-1, 2), counts

    @property
    def edges(self):
        return self._edge_table[0]

    @property
    def edge_face_counts(self):
        return self._edge_table[1]

    @property
    def boundary_edges(self):
        edges, counts = self._edge_table
        return edges[counts == 1]

    @property
    def non_manifold_edges(self):
        edges, counts = self._edge_table
        return edges[counts != 2], counts[counts != 2]

    @property
    def is_closed(self):
        return bool(self.face_count) and bool(np.all(self.edge_face_counts == 2))

    @cached_property
    def adjacency_matrix(self):
        edges = self.edges
        n = self.vertex_count
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        data = np.ones(len(rows), dtype=bool)
        return csr_array((data, (rows, cols)), shape=(n, n))

    @cached_property
    def adjacency(self):
        """N_i as a tuple of sorted neighbour index arrays (symmetric)."""
        matrix = self.adjacency_matrix
        return tuple(
            np.sort(matrix.indices[matrix.indptr[i] : matrix.indptr[i + 1]])
            for i in range(self.vertex_count)
        )

    @cached_property
    def degrees(self):
        """card(N_i)."""
        return np.diff(self.adjacency_matrix.indptr)

    @cached_property
    def components(self):
        """Connected-component label per vertex."""
        _, labels = csgraph.connected_components(self.adjacency_matrix, directed=False)
        return labels

    @cached_property
    def signed_volume(self):
        tri = self.triangles
        triple = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2]))
        return float(triple.sum() / 6.0)

    @cached_property
    def aabb(self):
        return BoundingBox.of_points(self.vertices)

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import trimesh
from django.conf import settings
from scipy.sparse import coo_array, csgraph
from scipy.spatial import cKDTree

from .domain import BoundingBox, Mesh
from .enums import MeshFormat
from .exceptions import MeshParseError, NonManifoldError, OpenMeshError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeshMeasurements:
    surface_area: float
    volume: float | None
    centroid: np.ndarray | None
    aabb: BoundingBox
    center_ratio: np.ndarray | None
    inverted: bool

    def to_dict(self):
        return {
            "surface_area": self.surface_area,
            "volume": self.volume,
            "centroid": None if self.centroid is None else self.centroid.tolist(),
            "center_ratio": (
                None if self.center_ratio is None else self.center_ratio.tolist()
            ),
            "aabb": self.aabb.to_dict(),
            "inverted": self.inverted,
        }


def weld_vertices(vertices, tolerance):
    """
    Merge vertices closer than ``tolerance``.

    Returns (unique_vertices, inverse) where ``inverse`` maps every input
    vertex onto its representative. Representatives keep first-occurrence
    order so repeated loads give identical indices.
    """
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
    n = len(vertices)
    if n == 0:
        return vertices, np.zeros(0, dtype=np.int64)
    pairs = cKDTree(vertices).query_pairs(r=tolerance, output_type="ndarray")
    graph = coo_array(
        (np.ones(len(pairs), dtype=bool), (pairs[:, 0], pairs[:, 1])), shape=(n, n)
    )
    _, labels = csgraph.connected_components(graph, directed=False)
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    inverse = relabel[labels]
    return vertices[np.sort(first)], inverse


def validate_manifold(mesh):
    """Raise NonManifoldError listing every edge not used by exactly 2 faces."""
    edges, counts = mesh.non_manifold_edges
    if len(edges):
        raise NonManifoldError(edges, counts)


def build_mesh(
    vertices,
    faces,
    *,
    name="mesh",
    weld_tolerance=None,
    repair_orientation=True,
    require_closed=True,
):
    """
    Weld, clean and validate raw triangle data.

    Zero-area faces are dropped with a warning. When the mesh is closed and
    its signed volume is negative every face is flipped (and a warning is
    logged) so faces end up CCW seen from outside.
    """
    config = settings.GRASPPRINT
    if weld_tolerance is None:
        weld_tolerance = config["WELD_TOLERANCE"]
    raw_faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    welded, inverse = weld_vertices(vertices, weld_tolerance)
    faces = inverse[raw_faces] if len(raw_faces) else raw_faces

    collapsed = (
        (faces[:, 0] == faces[:, 1])
        | (faces[:, 1] == faces[:, 2])
        | (faces[:, 2] == faces[:, 0])
    )
    tri = welded[faces]
    areas = 0.5 * np.linalg.norm(
        np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1
    )
    degenerate = collapsed | (areas < config["DEGENERATE_AREA"])
    if degenerate.any():
        logger.warning(
            "Dropping %d degenerate face(s) from %s: %s",
            int(degenerate.sum()),
            name,
            np.flatnonzero(degenerate)[:20].tolist(),
        )
        faces = faces[~degenerate]

    used = np.unique(faces)
    if len(used) != len(welded):
        remap = np.full(len(welded), -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        welded = welded[used]
        faces = remap[faces]

    mesh = Mesh(welded, faces, name=name)
    if require_closed:
        validate_manifold(mesh)
    if repair_orientation and mesh.is_closed and mesh.signed_volume < 0:
        logger.warning("%s is wound clockwise; flipping all faces.", name)
        mesh = mesh.flipped()
    return mesh


def load_mesh(path, file_format=None, **options):
    """Read STL (binary or ASCII) or OBJ (v/f records) into a validated Mesh."""
    path = Path(path)
    if not path.exists():
        raise MeshParseError(path, "file does not exist")
    file_format = MeshFormat(file_format) if file_format else MeshFormat.from_path(path)
    file_type = "obj" if file_format == MeshFormat.OBJ else "stl"
    try:
        loaded = trimesh.load(
            str(path), file_type=file_type, process=False, force="mesh"
        )
    except Exception as exc:
        raise MeshParseError(path, exc) from exc
    if not isinstance(loaded, trimesh.Trimesh) or len(loaded.faces) == 0:
        raise MeshParseError(path, "no triangles found")
    logger.info(
        "Loaded %s: %d raw vertices, %d faces",
        path.name,
        len(loaded.vertices),
        len(loaded.faces),
    )
    return build_mesh(loaded.vertices, loaded.faces, name=path.stem, **options)


def export_mesh(mesh, path, file_format=None):
    path = Path(path)
    file_format = MeshFormat(file_format) if file_format else MeshFormat.from_path(path)
    exported = trimesh.Trimesh(
        vertices=np.asarray(mesh.vertices), faces=np.asarray(mesh.faces), process=False
    ).export(file_type=file_format.trimesh_type)
    mode = "w" if isinstance(exported, str) else "wb"
    with open(path, mode) as handle:
        handle.write(exported)
    return path


def surface_area(mesh):
    return float(mesh.face_areas.sum())


def volume(mesh):
    if not mesh.is_closed:
        raise OpenMeshError(mesh.boundary_edges)
    return mesh.signed_volume


def centroid(mesh):
    """Volume-weighted centroid of the signed tetrahedra fan from the origin."""
    if not mesh.is_closed:
        raise OpenMeshError(mesh.boundary_edges)
    tri = mesh.triangles
    weights = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])) / 6.0
    total = weights.sum()
    if total == 0:
        return mesh.face_centroids.mean(axis=0)
    return (weights[:, None] * tri.sum(axis=1) / 4.0).sum(axis=0) / total


def measure(mesh, require_closed=True):
    """
    Area, volume, centroid and AABB of a mesh.

    Volume and centroid need a closed mesh; with ``require_closed=False`` an
    open mesh reports them as None instead of raising.
    """
    aabb = mesh.aabb
    area = surface_area(mesh)
    if not mesh.is_closed:
        if require_closed:
            raise OpenMeshError(mesh.boundary_edges)
        return MeshMeasurements(area, None, None, aabb, None, False)
    vol = mesh.signed_volume
    center = centroid(mesh)
    strokes = aabb.strokes
    ratio = np.divide(
        center - aabb.minimum, strokes, out=np.zeros(3), where=strokes > 0
    )
    if vol < 0:
        logger.warning("%s has negative signed volume (faces wound CW).", mesh.name)
    return MeshMeasurements(area, vol, center, aabb, ratio, vol < 0)


def fits_print_space(aabb, print_space):
    """True when the model strokes fit inside the printer's x_p, y_p, z_p."""
    return bool(np.all(aabb.strokes <= np.asarray(print_space, dtype=float)))

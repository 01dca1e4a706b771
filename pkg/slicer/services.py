import logging
import math

import numpy as np
from django.conf import settings
from shapely.geometry import LinearRing, LineString

from .domain import Layer, LayerStack
from .exceptions import SelfIntersectionError

logger = logging.getLogger(__name__)

MAX_NUDGES = 8


def shoelace(points):
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def find_crossing(points):
    """First pair of non-adjacent polygon edges that intersect, or None."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(points)
    edges = [LineString([points[i], points[(i + 1) % n]]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if edges[i].intersects(edges[j]):
                return i, j
    return None


def signed_area(polygon, *, check=True):
    """
    Shoelace area, positive for CCW and negative for CW loops.

    Raises:
        ValueError: fewer than 3 vertices.
        SelfIntersectionError: the loop crosses itself (when ``check``).
    """
    points = np.asarray(polygon, dtype=float).reshape(-1, 2)
    if len(points) < 3:
        raise ValueError("A polygon needs at least 3 vertices.")
    if check and not LinearRing(points).is_simple:
        crossing = find_crossing(points)
        if crossing is not None:
            raise SelfIntersectionError(*crossing)
    return shoelace(points)


def slice_levels(aabb, thickness):
    """Mid-layer heights z_min + (i + 1/2) d strictly below z_max."""
    z_min, z_b = float(aabb.minimum[2]), float(aabb.strokes[2])
    count = max(0, math.ceil(z_b / thickness - 0.5))
    levels = z_min + (np.arange(count) + 0.5) * thickness
    return levels[levels < z_min + z_b]


def _nudged(heights, z, epsilon):
    for _ in range(MAX_NUDGES):
        if not np.any(np.abs(heights - z) < epsilon):
            return z
        logger.warning(
            "Slice plane z=%.9g touches a vertex; nudging by %.3g.", z, epsilon
        )
        z += 2.0 * epsilon
    return z


def _section_segments(mesh, z):
    """Directed crossing segments as (edge_key_from, edge_key_to) plus points."""
    vertices = mesh.vertices
    above = vertices[:, 2] > z
    faces = mesh.faces
    flags = above[faces]
    crossing = np.flatnonzero(flags.any(axis=1) & ~flags.all(axis=1))
    points, segments = {}, []
    normals = mesh.face_normals
    for face_index in crossing:
        face = faces[face_index]
        keys = []
        for a, b in ((face[0], face[1]), (face[1], face[2]), (face[2], face[0])):
            if above[a] == above[b]:
                continue
            key = (min(a, b), max(a, b))
            if key not in points:
                pa, pb = vertices[key[0]], vertices[key[1]]
                t = (z - pa[2]) / (pb[2] - pa[2])
                points[key] = pa[:2] + t * (pb[:2] - pa[:2])
            keys.append(key)
        start, end = keys
        direction = points[end] - points[start]
        normal = normals[face_index]
        # segment must run along z x n so solids come out CCW
        if direction[0] * -normal[1] + direction[1] * normal[0] < 0:
            start, end = end, start
        segments.append((start, end))
    return segments, points


def _chain(segments, points, tolerance):
    successor = {}
    for start, end in segments:
        successor[start] = end
    loops, open_chains = [], 0
    visited = set()
    for start, _ in segments:
        if start in visited:
            continue
        loop, key = [], start
        while key not in visited and key in successor:
            visited.add(key)
            loop.append(key)
            key = successor[key]
        if key != start:
            open_chains += 1
            continue
        coords = [points[k] for k in loop]
        kept = [coords[0]]
        for point in coords[1:]:
            if np.linalg.norm(point - kept[-1]) > tolerance:
                kept.append(point)
        if len(kept) > 1 and np.linalg.norm(kept[0] - kept[-1]) <= tolerance:
            kept.pop()
        if len(kept) >= 3:
            loops.append(np.array(kept))
    return loops, open_chains


def slice_layer(mesh, z, *, index=0, z_min=None, z_b=None, strict=False):
    """Cut ``mesh`` with the plane at height ``z`` into a Layer."""
    config = settings.GRASPPRINT
    aabb = mesh.aabb
    z_min = float(aabb.minimum[2]) if z_min is None else z_min
    z_b = float(aabb.strokes[2]) if z_b is None else z_b
    z = _nudged(mesh.vertices[:, 2], float(z), config["SLICE_EPSILON"] * z_b)
    segments, points = _section_segments(mesh, z)
    loops, open_chains = _chain(segments, points, config["CHAIN_TOLERANCE"])
    if open_chains:
        logger.warning("Discarded %d open chain(s) at z=%.6g.", open_chains, z)

    areas = []
    for loop in loops:
        try:
            areas.append(signed_area(loop))
        except SelfIntersectionError as exc:
            if strict:
                raise
            logger.warning("Layer %d at z=%.6g: %s", index, z, exc)
            areas.append(signed_area(loop, check=False))
    return Layer(
        index=index,
        z=z,
        normalized_height=(z - z_min) / z_b,
        polygons=loops,
        signed_areas=areas,
    )


def slice_mesh(mesh, thickness=None, *, strict=False):
    """
    Slice a closed mesh into layers of thickness ``thickness`` (mm).

    Layers sit at z_min + (i + 1/2) d. A plane passing within 1e-7 z_b of a
    vertex is nudged upward and a warning is logged.
    """
    if thickness is None:
        thickness = settings.GRASPPRINT["LAYER_THICKNESS"]
    aabb = mesh.aabb
    z_b = float(aabb.strokes[2])
    if not 0 < thickness <= z_b:
        raise ValueError(f"Layer thickness must be in (0, {z_b:g}] mm.")
    z_min = float(aabb.minimum[2])
    layers = [
        slice_layer(mesh, z, index=i, z_min=z_min, z_b=z_b, strict=strict)
        for i, z in enumerate(slice_levels(aabb, thickness))
    ]
    logger.info(
        "Sliced %s into %d layer(s) of %.4g mm", mesh.name, len(layers), thickness
    )
    return LayerStack(layers=layers, thickness=float(thickness), aabb=aabb)

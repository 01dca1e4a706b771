import logging
import math

import numpy as np
from django.conf import settings

from .domain import SupportStats

logger = logging.getLogger(__name__)

HIT_TOLERANCE = 1e-9
CHUNK = 512


def _sub_triangle_centroids(triangle, k):
    """Centroids of the k*k sub-triangles of a k-fold edge subdivision."""
    a, b, c = triangle
    weights = []
    for i in range(k):
        for j in range(k - i):
            weights.append(((i + 1 / 3) / k, (j + 1 / 3) / k))
            if i + j <= k - 2:
                weights.append(((i + 2 / 3) / k, (j + 2 / 3) / k))
    weights = np.array(weights)
    return a + weights[:, :1] * (b - a) + weights[:, 1:] * (c - a)


def overhang_faces(mesh, threshold, bed_z):
    """Down-facing faces within ``threshold`` of -z, excluding faces on the bed."""
    downward = -mesh.face_normals[:, 2]
    on_bed = np.all(mesh.triangles[:, :, 2] <= bed_z + HIT_TOLERANCE, axis=1)
    return np.flatnonzero((downward >= math.cos(threshold)) & ~on_bed)


def sample_overhangs(mesh, faces, density):
    """
    Sample points and the area each stands for.

    With ``density`` (samples per mm^2) > 0 each face is split k-fold,
    k = ceil(sqrt(area * density)); otherwise its centroid is used.
    """
    points, areas = [], []
    for face in faces:
        area = mesh.face_areas[face]
        if density > 0:
            k = max(1, math.ceil(math.sqrt(area * density)))
            samples = _sub_triangle_centroids(mesh.triangles[face], k)
        else:
            samples = mesh.face_centroids[face][None, :]
        points.append(samples)
        areas.append(np.full(len(samples), area / len(samples)))
    if not points:
        return np.zeros((0, 3)), np.zeros(0)
    return np.vstack(points), np.concatenate(areas)


def first_hits_below(mesh, points):
    """
    Height of the first mesh surface strictly below each point (NaN if none).

    Casts vertical rays: a face is hit when the point's XY falls inside the
    face's XY projection; hits closer than HIT_TOLERANCE are ignored.
    """
    tri = mesh.triangles
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    e1, e2 = (b - a)[:, :2], (c - a)[:, :2]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    usable = np.abs(det) > 1e-15
    a, b, c = a[usable], b[usable], c[usable]
    e1, e2, det = e1[usable], e2[usable], det[usable]

    hits = np.full(len(points), np.nan)
    for start in range(0, len(points), CHUNK):
        chunk = points[start : start + CHUNK]
        rel = chunk[:, None, :2] - a[None, :, :2]
        u = (rel[..., 0] * e2[:, 1] - rel[..., 1] * e2[:, 0]) / det
        v = (e1[:, 0] * rel[..., 1] - e1[:, 1] * rel[..., 0]) / det
        inside = (u >= -1e-12) & (v >= -1e-12) & (u + v <= 1 + 1e-12)
        z = a[:, 2] + u * (b[:, 2] - a[:, 2]) + v * (c[:, 2] - a[:, 2])
        gap = chunk[:, None, 2] - z
        gap = np.where(inside & (gap > HIT_TOLERANCE), gap, np.inf)
        nearest = gap.min(axis=1)
        found = np.isfinite(nearest)
        hits[start : start + CHUNK][found] = chunk[found, 2] - nearest[found]
    return hits


def support_stats(mesh, overhang_threshold=None, sample_density=None, *, bed_z=None):
    """
    Vertical support columns under the down-facing facets of ``mesh``.

    Each sample drops a ray to the first surface below it; without a hit, or
    when the hit lies on the bed, the column is bed-terminated ("bottom").
    ``bed_z`` defaults to the model's z_min.
    """
    config = settings.GRASPPRINT
    if overhang_threshold is None:
        overhang_threshold = config["OVERHANG_THRESHOLD"]
    if sample_density is None:
        sample_density = config["SUPPORT_DENSITY"]
    bed_z = float(mesh.aabb.minimum[2]) if bed_z is None else float(bed_z)

    faces = overhang_faces(mesh, overhang_threshold, bed_z)
    points, areas = sample_overhangs(mesh, faces, sample_density)
    hits = first_hits_below(mesh, points) if len(points) else np.zeros(0)
    bottom = np.isnan(hits) | (hits <= bed_z + HIT_TOLERANCE)
    floor = np.where(bottom, bed_z, hits)
    lengths = np.clip(points[:, 2] - floor, 0.0, None) if len(points) else hits
    logger.info(
        "Supports for %s: %d overhang face(s), %d column(s), %d on the bed",
        mesh.name,
        len(faces),
        len(lengths),
        int(bottom.sum()),
    )
    return SupportStats(lengths=lengths, bottom=bottom, areas=areas, points=points)

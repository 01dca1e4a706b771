import itertools
import logging

import numpy as np
from django.conf import settings
from scipy.cluster.vq import kmeans2
from scipy.spatial import ConvexHull, QhullError

from .domain import GraspSpace, ObliqueEllipsoid, PrincipalAxes
from .exceptions import DegeneratePointsError, EllipsoidConvergenceError

logger = logging.getLogger(__name__)

DIMENSION = 3
EIGEN_TIE_TOLERANCE = 1e-10
GIMBAL_TOLERANCE = 1e-12


def rotation_x(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_zyx(angles):
    """R = R_z · R_y · R_x for angles given as (θ_x, θ_y, θ_z)."""
    theta_x, theta_y, theta_z = angles
    return rotation_z(theta_z) @ rotation_y(theta_y) @ rotation_x(theta_x)


def euler_zyx(rotation):
    """
    Inverse of rotation_zyx.

    In the gimbal case (|R[2, 0]| = 1) θ_z is fixed to 0 and the remaining
    rotation is attributed to θ_x.
    """
    r = np.asarray(rotation, dtype=float)
    sin_y = -np.clip(r[2, 0], -1.0, 1.0)
    theta_y = float(np.arcsin(sin_y))
    if abs(r[2, 0]) < 1.0 - GIMBAL_TOLERANCE:
        theta_x = float(np.arctan2(r[2, 1], r[2, 2]))
        theta_z = float(np.arctan2(r[1, 0], r[0, 0]))
    elif r[2, 0] < 0:
        theta_x = float(np.arctan2(r[0, 1], r[0, 2]))
        theta_z = 0.0
    else:
        theta_x = float(np.arctan2(-r[0, 1], -r[0, 2]))
        theta_z = 0.0
    return np.array([theta_x, theta_y, theta_z])


def _world_aligned_basis(basis):
    """Orthonormal basis of span(basis) built from projected world axes."""
    projector = basis @ basis.T
    projected = projector @ np.eye(DIMENSION)
    order = np.argsort(-np.linalg.norm(projected, axis=0), kind="stable")
    chosen = []
    for axis in order:
        vector = projected[:, axis].copy()
        for other in chosen:
            vector -= (other @ vector) * other
        norm = np.linalg.norm(vector)
        if norm > 1e-8:
            chosen.append(vector / norm)
        if len(chosen) == basis.shape[1]:
            break
    return np.column_stack(chosen)


def _eigen_frame(shape):
    values, vectors = np.linalg.eigh(shape)
    scale = max(abs(values).max(), 1e-300)
    groups = [[0]]
    for index in range(1, DIMENSION):
        if values[index] - values[groups[-1][0]] <= EIGEN_TIE_TOLERANCE * scale:
            groups[-1].append(index)
        else:
            groups.append([index])
    columns, eigenvalues = [], []
    for group in groups:
        basis = vectors[:, group]
        if len(group) > 1:
            basis = _world_aligned_basis(basis)
        columns.extend(basis.T)
        eigenvalues.extend(values[group])
    return np.array(columns), np.array(eigenvalues)


def decompose(ellipsoid):
    """
    Split A into semi-axes and Z-Y-X rotation angles.

    Rows of R are the principal axes. Axis labels are assigned so that R
    stays as close to the identity as possible (largest trace, det +1);
    ties prefer descending semi-axes, and equal eigenvalues take eigenvectors
    nearest the world axes.

    Returns:
        PrincipalAxes with semi_axes (x_r, y_r, z_r), angles (θ_x, θ_y, θ_z)
        and R.
    """
    shape = ellipsoid.shape if isinstance(ellipsoid, ObliqueEllipsoid) else ellipsoid
    shape = np.asarray(shape, dtype=float)
    rows, eigenvalues = _eigen_frame(shape)
    if np.any(eigenvalues <= 0):
        raise ValueError("Ellipsoid shape matrix must be positive-definite.")

    best = None
    for order in itertools.permutations(range(DIMENSION)):
        rotation = rows[list(order)].copy()
        for k in range(DIMENSION - 1):
            if rotation[k, k] < 0:
                rotation[k] = -rotation[k]
        if np.linalg.det(rotation) < 0:
            rotation[2] = -rotation[2]
        semi_axes = 1.0 / np.sqrt(eigenvalues[list(order)])
        score = (
            round(float(np.trace(rotation)), 9),
            bool(np.all(np.diff(semi_axes) <= 0)),
        )
        if best is None or score > best[0]:
            best = (score, rotation, semi_axes)

    _, rotation, semi_axes = best
    return PrincipalAxes(
        semi_axes=semi_axes, angles=euler_zyx(rotation), rotation=rotation
    )


def _hull_support(points):
    try:
        hull = ConvexHull(points)
    except QhullError:
        return points
    return points[np.unique(hull.simplices)]


def mvee(points, eps=None, max_iter=None):
    """
    Minimum-volume enclosing ellipsoid by Khachiyan's barycentric ascent.

    Iterates until max_i M_i <= (1 + eps)(d + 1), then rescales A so the
    farthest input point lies exactly on the surface.

    Raises:
        DegeneratePointsError: fewer than 4 points or no 3D extent.
        EllipsoidConvergenceError: iteration cap hit.
    """
    config = settings.GRASPPRINT
    eps = config["MVEE_EPS"] if eps is None else eps
    max_iter = config["MVEE_MAX_ITER"] if max_iter is None else max_iter
    if eps <= 0:
        raise ValueError("eps must be positive.")

    points = np.asarray(points, dtype=float).reshape(-1, DIMENSION)
    count = len(points)
    centered = points - points.mean(axis=0) if count else points
    extent = max(float(np.abs(centered).max()) if count else 0.0, 1.0)
    rank = int(np.linalg.matrix_rank(centered, tol=1e-9 * extent)) if count else 0
    if count < DIMENSION + 1 or rank < DIMENSION:
        raise DegeneratePointsError(rank, count)

    support = _hull_support(points)
    m = len(support)
    lifted = np.vstack([support.T, np.ones(m)])
    weights = np.full(m, 1.0 / m)
    target = (1.0 + eps) * (DIMENSION + 1)
    for iteration in range(1, max_iter + 1):
        moment = (lifted * weights) @ lifted.T
        leverage = np.einsum("ij,ij->j", lifted, np.linalg.solve(moment, lifted))
        j = int(np.argmax(leverage))
        peak = leverage[j]
        if peak <= target:
            break
        step = (peak - DIMENSION - 1.0) / ((DIMENSION + 1.0) * (peak - 1.0))
        weights *= 1.0 - step
        weights[j] += step
    else:
        raise EllipsoidConvergenceError(peak / (DIMENSION + 1) - 1.0, max_iter)

    center = weights @ support
    covariance = (support.T * weights) @ support - np.outer(center, center)
    shape = np.linalg.inv(covariance) / DIMENSION
    ellipsoid = ObliqueEllipsoid(center, shape)
    ellipsoid = ObliqueEllipsoid(
        center, shape / ellipsoid.quadratic_form(points).max()
    )
    logger.debug(
        "MVEE of %d points (%d on hull) converged in %d iterations",
        count,
        m,
        iteration,
    )
    return ellipsoid


def _is_full_rank(points):
    if len(points) < DIMENSION + 1:
        return False
    centered = points - points.mean(axis=0)
    extent = max(float(np.abs(centered).max()), 1.0)
    return int(np.linalg.matrix_rank(centered, tol=1e-9 * extent)) == DIMENSION


def initial_partition(points, clusters, seed):
    """k-means labels for ``points``; degenerate clusters merge into neighbours."""
    points = np.asarray(points, dtype=float)
    clusters = max(1, min(clusters, len(points) // (DIMENSION + 1)))
    if clusters == 1:
        return [np.arange(len(points))]
    _, labels = kmeans2(points, clusters, minit="++", seed=seed, missing="warn")
    subsets = [np.flatnonzero(labels == c) for c in range(clusters)]
    subsets = [s for s in subsets if len(s)]

    while True:
        weak = [i for i, s in enumerate(subsets) if not _is_full_rank(points[s])]
        if not weak or len(subsets) == 1:
            break
        index = weak[0]
        centre = points[subsets[index]].mean(axis=0)
        others = [i for i in range(len(subsets)) if i != index]
        distances = [
            np.linalg.norm(points[subsets[i]].mean(axis=0) - centre) for i in others
        ]
        target = others[int(np.argmin(distances))]
        subsets[target] = np.union1d(subsets[target], subsets[index])
        del subsets[index]
    return subsets


def _assign_faces(face_forms, tolerance):
    """Tightest ellipsoid holding all 3 vertices of each face, -1 if none."""
    worst = face_forms.max(axis=2)
    best = worst.argmin(axis=0)
    covered = worst.min(axis=0) <= 1.0 + tolerance
    return np.where(covered, best, -1), worst


def union_metrics(ellipsoids, samples=None, seed=None):
    """
    Monte-Carlo volume, centroid and surface area of a union of ellipsoids.

    Volume and centroid come from uniform samples in the union's AABB. Area
    samples each ellipsoid surface by mapping the unit sphere, weighting by
    the local area stretch, and keeps points not buried in another ellipsoid.
    """
    config = settings.GRASPPRINT
    samples = config["UNION_SAMPLES"] if samples is None else samples
    seed = config["SEED"] if seed is None else seed
    rng = np.random.default_rng(seed)

    lows = np.array([e.center - e.half_extents for e in ellipsoids])
    highs = np.array([e.center + e.half_extents for e in ellipsoids])
    low, high = lows.min(axis=0), highs.max(axis=0)
    cloud = rng.uniform(low, high, size=(samples, DIMENSION))
    forms = np.vstack([e.quadratic_form(cloud) for e in ellipsoids])
    inside = forms.min(axis=0) <= 1.0
    box_volume = float(np.prod(high - low))
    volume = box_volume * inside.mean()
    centroid = cloud[inside].mean(axis=0) if inside.any() else (low + high) / 2.0

    per_ellipsoid = max(1, samples // len(ellipsoids))
    area = 0.0
    for index, ellipsoid in enumerate(ellipsoids):
        values, vectors = np.linalg.eigh(ellipsoid.shape)
        stretch = vectors @ np.diag(values**-0.5) @ vectors.T
        inverse = vectors @ np.diag(values**0.5) @ vectors.T
        directions = rng.normal(size=(per_ellipsoid, DIMENSION))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        surface = ellipsoid.center + directions @ stretch.T
        weight = np.linalg.det(stretch) * np.linalg.norm(directions @ inverse, axis=1)
        exposed = np.ones(per_ellipsoid, dtype=bool)
        for other_index, other in enumerate(ellipsoids):
            if other_index != index:
                exposed &= other.quadratic_form(surface) >= 1.0
        area += 4.0 * np.pi * float(np.mean(weight * exposed))
    return volume, centroid, area


def build_grasp_space(
    mesh,
    max_ellipsoids=None,
    envelope_eps=None,
    *,
    reach_points=None,
    eps=None,
    seed=None,
    samples=None,
    max_rounds=50,
):
    """
    Cover every facet of ``mesh`` with a small union of MVEEs.

    Vertices (plus optional ``reach_points``, positions the hand sweeps
    through while grasping) are split by k-means. Faces whose three vertices
    do not share an ellipsoid are handed to the ellipsoid nearest their
    centroid, its subset absorbs the face vertices, and it is refitted. The
    loop ends when the envelope error (max containment slack over faces) is
    below ``envelope_eps`` or ``max_rounds`` passes were spent; in the latter
    case the result lists the uncovered faces.
    """
    config = settings.GRASPPRINT
    max_ellipsoids = (
        config["MAX_ELLIPSOIDS"] if max_ellipsoids is None else max_ellipsoids
    )
    envelope_eps = config["ENVELOPE_EPS"] if envelope_eps is None else envelope_eps
    seed = config["SEED"] if seed is None else seed
    if max_ellipsoids < 1:
        raise ValueError("max_ellipsoids must be at least 1.")

    points = np.asarray(mesh.vertices, dtype=float)
    if reach_points is not None and len(reach_points):
        points = np.vstack([points, np.asarray(reach_points, dtype=float)])
    faces = mesh.faces

    subsets = initial_partition(points, max_ellipsoids, seed)
    ellipsoids = [mvee(points[s], eps) for s in subsets]
    triangles = mesh.triangles.reshape(-1, DIMENSION)

    cover = np.full(len(faces), -1)
    envelope_error = np.inf
    for round_index in range(max_rounds):
        forms = np.vstack([e.quadratic_form(triangles) for e in ellipsoids])
        face_forms = forms.reshape(len(ellipsoids), len(faces), 3)
        cover, worst = _assign_faces(face_forms, envelope_eps)
        slack = np.clip(worst.min(axis=0) - 1.0, 0.0, None)
        envelope_error = float(slack.max()) if len(slack) else 0.0
        missing = np.flatnonzero(cover < 0)
        if envelope_error < envelope_eps and not len(missing):
            break

        centroid_forms = np.vstack(
            [e.quadratic_form(mesh.face_centroids[missing]) for e in ellipsoids]
        )
        owners = centroid_forms.argmin(axis=0)
        dirty = set()
        for face, owner in zip(missing, owners):
            grown = np.union1d(subsets[owner], faces[face])
            if len(grown) != len(subsets[owner]):
                subsets[owner] = grown
                dirty.add(int(owner))
        if not dirty:
            break
        for owner in sorted(dirty):
            ellipsoids[owner] = mvee(points[subsets[owner]], eps)
        logger.debug(
            "Cover round %d: %d faces reassigned, %d ellipsoid(s) refitted",
            round_index,
            len(missing),
            len(dirty),
        )

    uncovered = np.flatnonzero(cover < 0)
    if len(uncovered):
        logger.warning(
            "Grasp space leaves %d face(s) uncovered with %d ellipsoid(s).",
            len(uncovered),
            len(ellipsoids),
        )
    volume, centroid, area = union_metrics(ellipsoids, samples=samples, seed=seed)
    logger.info(
        "Grasp space: %d ellipsoid(s), envelope error %.3g, volume %.4g",
        len(ellipsoids),
        envelope_error,
        volume,
    )
    return GraspSpace(
        ellipsoids=ellipsoids,
        facet_cover=cover,
        envelope_error=envelope_error,
        centroid=centroid,
        surface_area=area,
        volume=volume,
        uncovered_faces=uncovered,
    )


def grasp_space_from_dict(data):
    """Rebuild a GraspSpace from its JSON export (union metrics are read back)."""
    ellipsoids = [
        ObliqueEllipsoid(item["center"], np.reshape(item["A"], (3, 3)))
        for item in data["ellipsoids"]
    ]
    return GraspSpace(
        ellipsoids=ellipsoids,
        facet_cover=data["facet_cover"],
        envelope_error=data["envelope_error"],
        centroid=data["centroid"],
        surface_area=data["surface_area"],
        volume=data["volume"],
        uncovered_faces=data.get("uncovered_faces", ()),
    )

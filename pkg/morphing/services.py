import json
import logging
from pathlib import Path

import numpy as np
from django.conf import settings
from scipy.sparse import csr_array, identity
from scipy.sparse.linalg import splu

from .domain import MorphResult, MorphSystem
from .enums import WeightMode
from .exceptions import (
    GraspSpaceViolationError,
    IsolatedVertexError,
    MorphConvergenceError,
    SingularSystemError,
)

logger = logging.getLogger(__name__)

REFINEMENT_STEPS = 3


def _weight_matrix(mesh, weight_mode, sigma):
    adjacency = mesh.adjacency_matrix.astype(float).tocoo()
    rows, cols = adjacency.row, adjacency.col
    degrees = mesh.degrees
    isolated = np.flatnonzero(degrees == 0)
    if len(isolated):
        raise IsolatedVertexError(isolated[0])

    if weight_mode == WeightMode.UNIFORM:
        data = 1.0 / degrees[rows]
    else:
        lengths = np.linalg.norm(mesh.vertices[rows] - mesh.vertices[cols], axis=1)
        scale = lengths.mean() if len(lengths) else 1.0
        data = np.exp(-((lengths / scale) ** 2) / sigma**2) / degrees[rows]
        totals = np.bincount(rows, weights=data, minlength=mesh.vertex_count)
        data = data / totals[rows]
    n = mesh.vertex_count
    return csr_array((data, (rows, cols)), shape=(n, n))


def build_laplacian(mesh, weight_mode=WeightMode.UNIFORM, *, sigma=None):
    """
    Laplacian L = I - W of ``mesh`` and its differential coordinates.

    ``uniform`` uses w_ij = 1 / card(N_i). ``gauss-uniform`` weighs each
    neighbour by exp(-(l_ij / mean_edge)^2 / sigma^2) / card(N_i) and then
    normalises the row so the weights still sum to 1.

    Raises:
        IsolatedVertexError: a vertex has no neighbours.
    """
    weight_mode = WeightMode(weight_mode)
    config = settings.GRASPPRINT
    sigma = config["GAUSS_SIGMA"] if sigma is None else sigma
    weights = _weight_matrix(mesh, weight_mode, sigma)
    laplacian = (identity(mesh.vertex_count, format="csr") - weights).tocsr()
    deltas = laplacian @ mesh.vertices
    return MorphSystem(
        vertices=mesh.vertices,
        laplacian=laplacian,
        weights=weights,
        deltas=deltas,
        weight_mode=weight_mode,
        constraint_weight=config["CONSTRAINT_WEIGHT"],
    )


def morph_energy(system, vertices):
    """
    Morphing energy of ``vertices`` against ``system``.

    Returns (total, laplacian_term, constraint_term) where the terms are
    sum_i ||L(V'_i) - delta_i||^2 and w^2 sum_c ||V'_c - target_c||^2.
    """
    vertices = np.asarray(vertices, dtype=float)
    laplacian_term = float(np.sum((system.laplacian @ vertices - system.deltas) ** 2))
    offsets = vertices[system.constraint_indices] - system.constraint_positions
    constraint_term = float(system.constraint_weight**2 * np.sum(offsets**2))
    return laplacian_term + constraint_term, laplacian_term, constraint_term


def _unconstrained_components(mesh_components, constrained):
    labels = np.unique(mesh_components)
    touched = np.unique(mesh_components[constrained])
    return np.setdiff1d(labels, touched)


def solve_morph(system, *, tolerance=None, components=None):
    """
    Least-squares solve of the stacked (L ; w(0|I)) V' = (Delta ; w U) system.

    The normal equations are factorised once with sparse LU and each axis is
    solved against the same factors, then polished by iterative refinement.

    Raises:
        SingularSystemError: no constraints, or a connected component without
            any constraint.
        MorphConvergenceError: relative residual above ``tolerance``.
    """
    if tolerance is None:
        tolerance = settings.GRASPPRINT["SOLVER_TOLERANCE"]
    if system.constraint_count == 0:
        raise SingularSystemError("no anchor or control vertices")
    if components is not None:
        loose = _unconstrained_components(components, system.constraint_indices)
        if len(loose):
            raise SingularSystemError(
                f"{len(loose)} connected component(s) carry no constraint"
            )

    matrix = system.stacked_matrix
    rhs = matrix.T @ system.stacked_rhs
    normal = (matrix.T @ matrix).tocsc()
    try:
        factor = splu(normal)
    except RuntimeError as exc:
        raise SingularSystemError(str(exc)) from exc

    solution = np.empty_like(rhs)
    residual = 0.0
    for axis in range(3):
        b = rhs[:, axis]
        x = factor.solve(b)
        for _ in range(REFINEMENT_STEPS):
            correction = b - normal @ x
            if np.linalg.norm(correction) <= tolerance * max(np.linalg.norm(b), 1.0):
                break
            x = x + factor.solve(correction)
        if not np.all(np.isfinite(x)):
            raise SingularSystemError("factorisation produced non-finite values")
        solution[:, axis] = x
        axis_residual = np.linalg.norm(b - normal @ x) / max(np.linalg.norm(b), 1.0)
        residual = max(residual, float(axis_residual))

    if residual > tolerance:
        raise MorphConvergenceError(residual, tolerance)
    energy, laplacian_term, constraint_term = morph_energy(system, solution)
    logger.debug(
        "Morph solved: %d vertices, %d constraints, energy %.6g, residual %.2e",
        system.vertex_count,
        system.constraint_count,
        energy,
        residual,
    )
    return MorphResult(
        vertices=solution,
        energy=energy,
        residual=residual,
        laplacian_energy=laplacian_term,
        constraint_energy=constraint_term,
    )


def select_anchors(mesh, space, controls):
    """
    Anchor rule for grasp-driven morphs.

    Ellipsoids that hold a control vertex (at rest or at its target) cover
    the moving fingers. Every other vertex outside all of those ellipsoids
    is anchored at its rest position. Connected components left without any
    constraint are anchored whole.
    """
    indices = np.array(sorted(controls), dtype=np.int64)
    targets = np.array([controls[i] for i in indices], dtype=float).reshape(-1, 3)
    endpoints = np.vstack([mesh.vertices[indices], targets])
    forms = space.quadratic_forms(endpoints)
    moving = np.flatnonzero((forms <= 1.0 + 1e-9).any(axis=1))

    anchored = np.ones(mesh.vertex_count, dtype=bool)
    if len(moving):
        inside = space.quadratic_forms(mesh.vertices)[moving] <= 1.0 + 1e-9
        anchored &= ~inside.any(axis=0)
    anchored[indices] = False

    components = mesh.components
    constrained = np.flatnonzero(anchored)
    loose = _unconstrained_components(
        components, np.concatenate([constrained, indices])
    )
    if len(loose):
        logger.warning(
            "Anchoring %d unconstrained component(s) of %s.", len(loose), mesh.name
        )
        anchored |= np.isin(components, loose)
        anchored[indices] = False
    return np.flatnonzero(anchored)


def morph_by_grasp(
    mesh,
    space,
    chain_targets,
    *,
    weight_mode=WeightMode.UNIFORM,
    system=None,
    tolerance=None,
):
    """
    Morph ``mesh`` so the bound vertices reach ``chain_targets``.

    Args:
        mesh: rest-pose mesh.
        space: GraspSpace every target must lie in.
        chain_targets: {vertex_index: (x, y, z)} control targets.
        system: optional prebuilt Laplacian of ``mesh`` to reuse.

    Raises:
        GraspSpaceViolationError: a target is outside every ellipsoid.
    """
    controls = {int(k): np.asarray(v, dtype=float) for k, v in chain_targets.items()}
    for vertex in controls:
        if not 0 <= vertex < mesh.vertex_count:
            raise ValueError(f"Control vertex {vertex} is not a vertex of {mesh.name}.")
    if not controls:
        return MorphResult(vertices=mesh.vertices, energy=0.0, residual=0.0)

    indices = sorted(controls)
    targets = np.array([controls[i] for i in indices])
    forms = space.quadratic_forms(targets).min(axis=0)
    outside = np.flatnonzero(forms > 1.0 + 1e-9)
    if len(outside):
        first = outside[0]
        raise GraspSpaceViolationError(indices[first], forms[first])

    system = system or build_laplacian(mesh, weight_mode)
    anchors = select_anchors(mesh, space, controls)
    system = system.with_constraints(anchors=anchors, controls=controls)
    return solve_morph(system, tolerance=tolerance, components=mesh.components)


def load_constraints(path):
    """Read a {vertex_index: [x, y, z]} JSON map."""
    with open(path) as handle:
        data = json.load(handle)
    return {int(k): np.asarray(v, dtype=float) for k, v in data.items()}


def dump_constraints(constraints, path):
    """Write the map ``load_constraints`` reads back."""
    payload = {
        str(k): np.asarray(v, dtype=float).tolist() for k, v in constraints.items()
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True))
    return Path(path)

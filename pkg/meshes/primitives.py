"""Analytic test shapes: closed, CCW-wound meshes built in memory."""

import numpy as np
import trimesh

from .services import build_mesh


def _from_trimesh(shape, name):
    return build_mesh(shape.vertices, shape.faces, name=name)


def box(minimum=(0.0, 0.0, 0.0), maximum=(1.0, 1.0, 1.0), name="box"):
    minimum = np.asarray(minimum, dtype=float)
    maximum = np.asarray(maximum, dtype=float)
    transform = trimesh.transformations.translation_matrix((minimum + maximum) / 2)
    return _from_trimesh(
        trimesh.creation.box(extents=maximum - minimum, transform=transform), name
    )


def unit_cube():
    return box(name="unit_cube")


def icosphere(radius=10.0, subdivisions=3, center=(0.0, 0.0, 0.0)):
    """subdivisions=3 gives the 1280-face sphere."""
    sphere = trimesh.creation.icosphere(subdivisions=subdivisions, radius=radius)
    sphere.apply_translation(center)
    return _from_trimesh(sphere, "icosphere")


def combine(*meshes, name="combined"):
    vertices, faces, offset = [], [], 0
    for mesh in meshes:
        vertices.append(mesh.vertices)
        faces.append(mesh.faces + offset)
        offset += mesh.vertex_count
    return build_mesh(np.vstack(vertices), np.vstack(faces), name=name)


def square_tube(outer=2.0, inner=1.0, height=1.0, name="square_tube"):
    """
    A square prism with a centred square through-hole.

    Outer square ``outer`` x ``outer`` and hole ``inner`` x ``inner``, both
    centred on (outer/2, outer/2), extruded from z=0 to ``height``.
    """
    c = outer / 2.0
    o = [(0, 0), (outer, 0), (outer, outer), (0, outer)]
    h = inner / 2.0
    i = [(c - h, c - h), (c + h, c - h), (c + h, c + h), (c - h, c + h)]
    ring = o + i
    vertices = [(x, y, 0.0) for x, y in ring] + [(x, y, height) for x, y in ring]
    bottom = lambda k: k  # noqa: E731
    top = lambda k: k + 8  # noqa: E731
    faces = []
    for k in range(4):
        a, b = k, (k + 1) % 4
        # outer wall, normal pointing away from the centre
        faces.append((bottom(a), bottom(b), top(b)))
        faces.append((bottom(a), top(b), top(a)))
        # hole wall, normal pointing into the hole
        faces.append((bottom(4 + b), bottom(4 + a), top(4 + a)))
        faces.append((bottom(4 + b), top(4 + a), top(4 + b)))
        # top annulus (+z) and bottom annulus (-z)
        faces.append((top(a), top(b), top(4 + b)))
        faces.append((top(a), top(4 + b), top(4 + a)))
        faces.append((bottom(a), bottom(4 + b), bottom(b)))
        faces.append((bottom(a), bottom(4 + a), bottom(4 + b)))
    return build_mesh(np.array(vertices), np.array(faces), name=name)


def plate(size=10.0, thickness=1.0, height=10.0, name="plate"):
    """Horizontal plate whose underside sits ``height`` above z=0."""
    return box((0.0, 0.0, height), (size, size, height + thickness), name=name)


def table(size=10.0, thickness=1.0, height=10.0, leg=1.0, name="table"):
    """Plate on four square legs standing on z=0."""
    legs = [
        box((x, y, 0.0), (x + leg, y + leg, height))
        for x in (0.0, size - leg)
        for y in (0.0, size - leg)
    ]
    return combine(plate(size, thickness, height), *legs, name=name)

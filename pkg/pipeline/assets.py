"""
Synthetic articulated hand shipped as the example asset.

A palm slab with four fingers along +y and a thumb along -x. Each digit is a
square tube of seven vertex rings riding on a three-link planar DH chain
whose joints curl it upward (+z), away from the bed. Digits keep a 1 mm gap
to the palm so every slice stays a set of disjoint simple loops.
"""

from functools import lru_cache

import numpy as np

from kinematics.domain import KinematicChain
from kinematics.hand import GraspSchedule, HandModel
from meshes.primitives import box, combine
from meshes.services import build_mesh

PALM = ((0.0, 0.0, 0.0), (80.0, 90.0, 20.0))
HALF_WIDTH = 7.0
FINGER_LINKS = (25.0, 18.0, 15.0)
THUMB_LINKS = (20.0, 15.0, 12.0)
GAP = 1.0

# name -> (root point, link direction, side direction)
DIGITS = {
    "thumb": ((-GAP, 30.0, 10.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    "index": ((70.0, 90.0 + GAP, 10.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
    "middle": ((50.0, 90.0 + GAP, 10.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
    "ring": ((30.0, 90.0 + GAP, 10.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
    "little": ((10.0, 90.0 + GAP, 10.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
}

SCHEDULES = {
    "claws": {
        "thumb": (0.3, 0.3, 0.2),
        "index": (0.6, 0.7, 0.5),
        "middle": (0.6, 0.7, 0.5),
        "ring": (0.6, 0.7, 0.5),
        "little": (0.6, 0.7, 0.5),
    },
    "capisce": {
        "thumb": (0.6, 0.5, 0.4),
        "index": (0.5, 0.6, 0.4),
        "middle": (0.2, 0.2, 0.1),
        "ring": (0.1, 0.1, 0.1),
        "little": (0.1, 0.1, 0.1),
    },
}
SCHEDULE_SAMPLES = 5


def _links(name):
    return THUMB_LINKS if name == "thumb" else FINGER_LINKS


def _ring_stations(links):
    """Seven ring positions along the digit and the frame each one rides on."""
    a1, a2, a3 = links
    stations = [0, a1 / 2, a1, a1 + a2 / 2, a1 + a2, a1 + a2 + a3 / 2, a1 + a2 + a3]
    return np.array(stations), [0, 1, 1, 2, 2, 3, 3]


def _base(root, along, side):
    """DH base frame: x along the digit, z on the joint axis, y pointing up."""
    x, z = np.array(along), np.array(side)
    y = np.cross(z, x)
    base = np.eye(4)
    base[:3, 0], base[:3, 1], base[:3, 2], base[:3, 3] = x, y, z, root
    return base


def digit_chain(name):
    root, along, side = DIGITS[name]
    links = [{"theta": 0.0, "d": 0.0, "a": a, "alpha": 0.0} for a in _links(name)]
    return KinematicChain(links=links, base=_base(root, along, side), name=name)


def digit_tube(name):
    """Closed square tube for one digit; rings of 4 vertices in station order."""
    root, along, side = (np.array(v) for v in DIGITS[name])
    up = np.cross(side, along)
    stations, _ = _ring_stations(_links(name))
    corners = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
    vertices = [
        root + s * along + HALF_WIDTH * (u * side + v * up)
        for s in stations
        for u, v in corners
    ]
    faces = [(0, 1, 2), (0, 2, 3)]
    last = 4 * (len(stations) - 1)
    faces += [(last, last + 2, last + 1), (last, last + 3, last + 2)]
    for r in range(len(stations) - 1):
        for k in range(4):
            a, b = 4 * r + k, 4 * r + (k + 1) % 4
            faces += [(a, b + 4, b), (a, a + 4, b + 4)]
    return build_mesh(np.array(vertices), np.array(faces), name=name)


@lru_cache(maxsize=1)
def _hand_assembly():
    palm = box(*PALM, name="palm")
    tubes = [digit_tube(name) for name in DIGITS]
    mesh = combine(palm, *tubes, name="hand")
    groups, offset = [], palm.vertex_count
    for name, tube in zip(DIGITS, tubes):
        _, frames = _ring_stations(_links(name))
        for ring, frame in enumerate(frames):
            groups.append((name, frame, offset + 4 * ring + np.arange(4)))
        offset += tube.vertex_count
    chains = {name: digit_chain(name) for name in DIGITS}
    return mesh, HandModel.bind(chains, mesh.vertices, groups)


def synthetic_hand():
    """(mesh, HandModel) of the example hand at rest."""
    return _hand_assembly()


def grasp_schedule(name, samples=SCHEDULE_SAMPLES):
    """Joint angles easing linearly from rest to the named grasp over 1 s."""
    final = SCHEDULES[name]
    columns = [f"{digit}.{j}" for digit in DIGITS for j in range(3)]
    target = np.array([final[digit][j] for digit in DIGITS for j in range(3)])
    times = np.linspace(0.0, 1.0, samples)
    return GraspSchedule(name, times, columns, np.outer(times, target))


def builtin_schedules():
    return [grasp_schedule(name) for name in SCHEDULES]

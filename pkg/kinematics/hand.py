from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .services import frame_origins, frame_transforms


@dataclass(frozen=True)
class VertexBinding:
    """Mesh vertices rigidly attached to frame ``frame`` of finger ``finger``."""

    finger: str
    frame: int
    vertices: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=np.int64, copy=True).reshape(-1)
        offsets = np.array(self.offsets, dtype=float, copy=True).reshape(-1, 3)
        vertices.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "offsets", offsets)


@dataclass(frozen=True)
class GraspSchedule:
    """Joint-angle samples over time, one column per ``finger.joint``."""

    name: str
    times: np.ndarray
    columns: tuple
    angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "columns", tuple(self.columns))
        angles = np.asarray(self.angles, dtype=float).reshape(len(self.times), -1)
        object.__setattr__(self, "angles", angles)

    def __len__(self):
        return len(self.times)

    def pose(self, index):
        """{finger: joint angles} at sample ``index``."""
        pose = {}
        for column, value in zip(self.columns, self.angles[index]):
            finger, joint = column.rsplit(".", 1)
            pose.setdefault(finger, {})[int(joint)] = value
        return {
            finger: np.array([joints[j] for j in sorted(joints)])
            for finger, joints in pose.items()
        }

    def poses(self):
        return [self.pose(i) for i in range(len(self))]


@dataclass(frozen=True)
class HandModel:
    """
    Finger chains plus the mesh vertices each chain frame carries.

    A pose moves every bound vertex rigidly with its frame, which turns
    joint angles into morph control targets.
    """

    chains: dict
    bindings: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "chains", dict(self.chains))
        object.__setattr__(self, "bindings", tuple(self.bindings))

    @classmethod
    def bind(cls, chains, vertices, groups):
        """
        Build bindings from rest-pose vertex positions.

        ``groups`` is an iterable of (finger, frame, vertex_indices).
        """
        vertices = np.asarray(vertices, dtype=float)
        bindings = []
        for finger, frame, indices in groups:
            rest = frame_transforms(chains[finger])[frame]
            inverse = np.linalg.inv(rest)
            indices = np.asarray(indices, dtype=np.int64)
            local = vertices[indices] @ inverse[:3, :3].T + inverse[:3, 3]
            bindings.append(VertexBinding(finger, int(frame), indices, local))
        return cls(chains, bindings)

    @property
    def joint_names(self):
        return [
            f"{finger}.{j}"
            for finger, chain in self.chains.items()
            for j in range(len(chain))
        ]

    @property
    def joint_count(self):
        return sum(len(chain) for chain in self.chains.values())

    @property
    def bound_vertices(self):
        if not self.bindings:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([b.vertices for b in self.bindings])

    def rest_pose(self):
        return {finger: chain.angles for finger, chain in self.chains.items()}

    def pose_from_vector(self, vector):
        """Split a flat joint vector (``joint_names`` order) into a pose."""
        vector = np.asarray(vector, dtype=float).reshape(-1)
        if len(vector) != self.joint_count:
            raise ValueError(
                f"Expected {self.joint_count} joint angles, got {len(vector)}."
            )
        pose, start = {}, 0
        for finger, chain in self.chains.items():
            pose[finger] = vector[start : start + len(chain)]
            start += len(chain)
        return pose

    def pose_vector(self, pose):
        rest = self.rest_pose()
        return np.concatenate(
            [np.asarray(pose.get(finger, rest[finger])) for finger in self.chains]
        )

    def frames(self, pose):
        rest = self.rest_pose()
        return {
            finger: frame_transforms(chain, pose.get(finger, rest[finger]))
            for finger, chain in self.chains.items()
        }

    def targets(self, pose):
        """{vertex: world position} of every bound vertex in ``pose``."""
        frames = self.frames(pose)
        targets = {}
        for binding in self.bindings:
            transform = frames[binding.finger][binding.frame]
            moved = binding.offsets @ transform[:3, :3].T + transform[:3, 3]
            targets.update(zip(binding.vertices.tolist(), moved))
        return targets

    def joint_origins(self, pose):
        """{finger: (t+1) x 3 frame origins, base first} in ``pose``."""
        rest = self.rest_pose()
        return {
            finger: frame_origins(chain, pose.get(finger, rest[finger]))
            for finger, chain in self.chains.items()
        }

    def fingertips(self, pose):
        return {
            finger: origins[-1] for finger, origins in self.joint_origins(pose).items()
        }

    def swept_points(self, poses):
        """Bound-vertex positions over a sequence of poses, stacked."""
        chunks = [np.array(list(self.targets(pose).values())) for pose in poses]
        chunks = [chunk for chunk in chunks if len(chunk)]
        return np.vstack(chunks) if chunks else np.zeros((0, 3))

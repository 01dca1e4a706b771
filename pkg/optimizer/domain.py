from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .enums import Objective, ProcessVariable


@dataclass(frozen=True)
class Bounds:
    """Per-variable box [lower, upper]; equal ends pin a variable."""

    lower: np.ndarray
    upper: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape:
            raise ValueError("Lower and upper bounds differ in length.")
        if np.any(lower > upper):
            raise ValueError("A lower bound exceeds its upper bound.")
        names = tuple(self.names) or tuple(f"x{i}" for i in range(len(lower)))
        if len(names) != len(lower):
            raise ValueError("Bounds need one name per variable.")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "names", names)

    @classmethod
    def of_pairs(cls, pairs, names=()):
        pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0], pairs[:, 1], names)

    def __len__(self):
        return len(self.lower)

    @property
    def span(self):
        return self.upper - self.lower

    def contains(self, x, tolerance=1e-12):
        x = np.asarray(x, dtype=float)
        return bool(
            np.all(x >= self.lower - tolerance) and np.all(x <= self.upper + tolerance)
        )

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class DecisionVector:
    """Joint angles of the grasp pose plus the four process settings."""

    joint_angles: np.ndarray
    nozzle_temperature: float
    temperature_gradient: float
    velocity: float
    layer_thickness: float

    def __post_init__(self):
        angles = np.array(self.joint_angles, dtype=float, copy=True).ravel()
        angles.setflags(write=False)
        object.__setattr__(self, "joint_angles", angles)

    @classmethod
    def from_array(cls, x, joint_count):
        x = np.asarray(x, dtype=float).ravel()
        if len(x) != joint_count + len(ProcessVariable.values):
            raise ValueError(
                f"Decision vector needs {joint_count} joint angle(s) and "
                f"{len(ProcessVariable.values)} process settings; got {len(x)} values."
            )
        return cls(x[:joint_count], *x[joint_count:].tolist())

    def as_array(self):
        return np.concatenate(
            [
                self.joint_angles,
                [
                    self.nozzle_temperature,
                    self.temperature_gradient,
                    self.velocity,
                    self.layer_thickness,
                ],
            ]
        )


@dataclass(frozen=True)
class Evaluation:
    """
    Objective values of one candidate.

    ``violation`` is 0 for feasible candidates. ``extras`` carries reported
    (not optimized) quantities such as t_T and E_melting.
    """

    objectives: tuple
    violation: float = 0.0
    reason: str = ""
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "objectives", tuple(float(v) for v in self.objectives)
        )
        object.__setattr__(self, "violation", float(self.violation))

    @classmethod
    def infeasible(cls, objective_count, violation, reason):
        return cls((np.inf,) * objective_count, violation, reason)

    @property
    def feasible(self):
        return self.violation <= 0.0

    def to_dict(self):
        names = Objective.values if len(self.objectives) == 3 else None
        names = names or [f"f{i}" for i in range(len(self.objectives))]
        return {
            **dict(zip(names, self.objectives)),
            "violation": self.violation,
            "reason": self.reason,
            **self.extras,
        }


@dataclass(frozen=True)
class Individual:
    x: np.ndarray
    evaluation: Evaluation
    rank: int
    crowding: float

    @property
    def objectives(self):
        return self.evaluation.objectives

    @property
    def feasible(self):
        return self.evaluation.feasible


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best: tuple
    hypervolume: float
    feasible: int


@dataclass(frozen=True)
class ParetoFront:
    """Final population sorted by (rank, -crowding) with its search history."""

    members: tuple
    bounds: Bounds
    history: tuple = ()
    reference_point: tuple = ()

    def __len__(self):
        return len(self.members)

    @property
    def front(self):
        """Rank-0 members."""
        return tuple(m for m in self.members if m.rank == 0)

    @property
    def feasible_front(self):
        return tuple(m for m in self.front if m.feasible)

    def decisions(self, members=None):
        members = self.front if members is None else members
        return np.array([m.x for m in members]).reshape(len(members), -1)

    def objectives(self, members=None):
        members = self.front if members is None else members
        return np.array([m.objectives for m in members]).reshape(len(members), -1)

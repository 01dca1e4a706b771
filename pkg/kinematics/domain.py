from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .enums import ContactModel


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Link:
    """DH parameters of one joint: theta, alpha in rad; d, a in mm."""

    theta: float = 0.0
    d: float = 0.0
    a: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("theta", "d", "a", "alpha"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"DH parameter {name} must be finite.")
            object.__setattr__(self, name, value)

    def to_dict(self):
        return {"theta": self.theta, "d": self.d, "a": self.a, "alpha": self.alpha}


@dataclass(frozen=True)
class KinematicChain:
    """Serial finger: frame {0} is the base, frame {t} the fingertip."""

    links: tuple
    base: np.ndarray = field(default_factory=lambda: np.eye(4))
    name: str = field(default="finger", compare=False)

    def __post_init__(self):
        links = tuple(
            link if isinstance(link, Link) else Link(**link) for link in self.links
        )
        if not links:
            raise ValueError("A kinematic chain needs at least one link.")
        base = _frozen(self.base).reshape(4, 4)
        object.__setattr__(self, "links", links)
        object.__setattr__(self, "base", base)

    def __len__(self):
        return len(self.links)

    @property
    def angles(self):
        return np.array([link.theta for link in self.links])

    def with_angles(self, angles):
        angles = np.asarray(angles, dtype=float).reshape(-1)
        if len(angles) != len(self.links):
            raise ValueError(
                f"{self.name} has {len(self.links)} joints, got {len(angles)} angles."
            )
        links = tuple(
            replace(link, theta=theta) for link, theta in zip(self.links, angles)
        )
        return replace(self, links=links)

    def to_dict(self):
        return {
            "base": self.base.tolist(),
            "links": [link.to_dict() for link in self.links],
        }


@dataclass(frozen=True)
class Contact:
    """Point contact on the object with its inward unit normal."""

    point: np.ndarray
    normal: np.ndarray
    model: str = ContactModel.SOFT_FINGER

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float).reshape(3)
        length = np.linalg.norm(normal)
        if length == 0:
            raise ValueError("Contact normal must be non-zero.")
        object.__setattr__(self, "point", _frozen(self.point).reshape(3))
        object.__setattr__(self, "normal", _frozen(normal / length))
        object.__setattr__(self, "model", ContactModel(self.model))


@dataclass(frozen=True)
class GraspRates:
    contact_velocity: np.ndarray
    joint_rates: np.ndarray
    rank: int
    full_rank: bool
    residual: float


@dataclass(frozen=True)
class GraspModel:
    """Fingers, one contact per finger and the reference point of the object."""

    fingers: tuple
    contacts: tuple
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "fingers", tuple(self.fingers))
        object.__setattr__(self, "contacts", tuple(self.contacts))
        object.__setattr__(self, "center", _frozen(self.center).reshape(3))
        if len(self.fingers) != len(self.contacts):
            raise ValueError("Each finger needs exactly one contact.")

    @property
    def p(self):
        return 6

    @property
    def m(self):
        return 4 * len(self.contacts)

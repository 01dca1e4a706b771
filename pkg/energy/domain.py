from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from django.conf import settings

from .enums import AssociatedError, IsolatedError
from .exceptions import EnergyModelError, PowerLogError


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MaterialParams:
    """
    Filament properties.

    specific_heat kJ/(kg K), density kg/m^3, temperatures K, latent_heat kJ/kg,
    filament_area mm^2.
    """

    specific_heat: float
    density: float
    melt_temperature: float
    ambient_temperature: float
    latent_heat: float
    filament_area: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not np.isfinite(value) or value <= 0:
                raise EnergyModelError(f"Material '{name}' must be positive.")
        if self.melt_temperature <= self.ambient_temperature:
            raise EnergyModelError(
                "Melt temperature must exceed the ambient temperature."
            )

    @classmethod
    def from_dict(cls, data):
        fields = cls.__dataclass_fields__
        unknown = sorted(set(data) - set(fields))
        if unknown:
            raise EnergyModelError(f"Unknown material field(s): {', '.join(unknown)}")
        missing = sorted(set(fields) - set(data))
        if missing:
            raise EnergyModelError(f"Missing material field(s): {', '.join(missing)}")
        return cls(**{name: float(value) for name, value in data.items()})

    @classmethod
    def default(cls):
        return cls.from_dict(settings.GRASPPRINT["MATERIAL"])

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class PowerLog:
    """Sampled printer power: timestamps (s) and power (W)."""

    times: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times).ravel()
        powers = _frozen(self.powers).ravel()
        if len(times) != len(powers):
            raise PowerLogError(
                min(len(times), len(powers)), "timestamp and power counts differ"
            )
        for i in np.flatnonzero(~np.isfinite(times) | ~np.isfinite(powers))[:1]:
            raise PowerLogError(i, "non-finite value")
        for i in np.flatnonzero(np.diff(times) <= 0)[:1]:
            raise PowerLogError(i + 1, "timestamps must be strictly increasing")
        for i in np.flatnonzero(powers < 0)[:1]:
            raise PowerLogError(i, "power must be non-negative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "powers", powers)

    def __len__(self):
        return len(self.times)

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0]) if len(self) else 0.0


@dataclass(frozen=True)
class GeometricError:
    """
    Aggregate deformation: the largest in-plane facet deviation norm.

    ``isolated`` and ``associated`` hold tolerance-class readings keyed by
    IsolatedError / AssociatedError values; classes that need a datum
    surface or axis stay unset.
    """

    value: float
    facet: int
    deviations: np.ndarray = field(repr=False)
    isolated: dict = field(default_factory=dict)
    associated: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "deviations", _frozen(self.deviations).reshape(-1, 2))
        for key, value in {**self.isolated, **self.associated}.items():
            if value < 0:
                raise EnergyModelError(f"Geometric error '{key}' must be >= 0.")
        for key in self.isolated:
            IsolatedError(key)
        for key in self.associated:
            AssociatedError(key)

    @property
    def norms(self):
        return np.hypot(self.deviations[:, 0], self.deviations[:, 1])

    def to_dict(self):
        return {
            "epsilon_geometric": self.value,
            "facet": self.facet,
            "facet_count": len(self.deviations),
            "isolated": dict(self.isolated),
            "associated": dict(self.associated),
        }


@dataclass(frozen=True)
class EnergyReport:
    """Energy terms in kJ, times in s."""

    melting: float
    print_time: float
    motion: float
    measured: float | None = None
    layers: tuple = ()

    @property
    def total(self):
        return self.melting + self.motion

    def to_dict(self):
        return {
            "E_melting": self.melting,
            "t_T": self.print_time,
            "E_motion": self.motion,
            "E_analytic": self.total,
            "E_total": self.measured,
            "layers": list(self.layers),
        }

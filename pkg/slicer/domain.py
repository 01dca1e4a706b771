from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np
import shapely
from shapely.geometry import Polygon


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Layer:
    """
    One horizontal section of the model.

    ``polygons`` are closed loops (k x 2, first point not repeated). CCW
    loops bound solid material and CW loops bound holes, so ``section_area``
    is the signed sum of their areas.
    """

    index: int
    z: float
    normalized_height: float
    polygons: tuple
    signed_areas: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "polygons", tuple(_frozen(p).reshape(-1, 2) for p in self.polygons)
        )
        object.__setattr__(
            self, "signed_areas", tuple(float(a) for a in self.signed_areas)
        )

    @property
    def section_area(self):
        return float(sum(self.signed_areas))

    @property
    def signs(self):
        return tuple(1 if a > 0 else -1 for a in self.signed_areas)

    @property
    def is_empty(self):
        return not self.polygons

    @cached_property
    def region(self):
        """Solid region as a shapely geometry (even-odd union of the loops)."""
        loops = [
            shapely.make_valid(Polygon(p)) for p in self.polygons if len(p) >= 3
        ]
        if not loops:
            return Polygon()
        return reduce(shapely.symmetric_difference, loops)

    def to_dict(self):
        return {
            "index": self.index,
            "z": self.z,
            "h_n": self.normalized_height,
            "section_area": self.section_area,
            "polygons": [
                {"sign": sign, "area": area, "points": polygon.tolist()}
                for polygon, sign, area in zip(
                    self.polygons, self.signs, self.signed_areas
                )
            ],
        }


@dataclass(frozen=True)
class LayerStack:
    layers: tuple
    thickness: float
    aabb: object

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __getitem__(self, index):
        return self.layers[index]

    @property
    def frame(self):
        """Model-wide XY frame (xmin, ymin, xmax, ymax) shared by all masks."""
        low, high = self.aabb.minimum, self.aabb.maximum
        return (float(low[0]), float(low[1]), float(high[0]), float(high[1]))

    @property
    def section_volume(self):
        return float(sum(layer.section_area for layer in self.layers) * self.thickness)


@dataclass(frozen=True)
class LCM:
    """Layered customized mask: binary raster of a layer's solid region."""

    mask: np.ndarray
    frame: tuple

    def __post_init__(self):
        object.__setattr__(self, "mask", _frozen(self.mask, np.uint8))
        object.__setattr__(self, "frame", tuple(float(v) for v in self.frame))

    @property
    def resolution(self):
        return self.mask.shape[0]

    @property
    def pixel_area(self):
        xmin, ymin, xmax, ymax = self.frame
        rows, cols = self.mask.shape
        return (xmax - xmin) * (ymax - ymin) / (rows * cols)

    @property
    def area(self):
        return float(self.mask.sum() * self.pixel_area)


@dataclass(frozen=True)
class ToolpathMetrics:
    pattern: str
    spacing: float
    length: float
    turns: int
    infill_rate: float
    segments: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {
            "pattern": str(self.pattern),
            "spacing": self.spacing,
            "L_T": self.length,
            "n_point": self.turns,
            "r_infill": self.infill_rate,
            "segment_count": len(self.segments),
        }


@dataclass(frozen=True)
class SupportStats:
    lengths: np.ndarray
    bottom: np.ndarray
    areas: np.ndarray
    points: np.ndarray = field(repr=False, default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        object.__setattr__(self, "lengths", _frozen(self.lengths))
        object.__setattr__(self, "bottom", _frozen(self.bottom, bool))
        object.__setattr__(self, "areas", _frozen(self.areas))
        object.__setattr__(self, "points", _frozen(self.points).reshape(-1, 3))

    def __len__(self):
        return len(self.lengths)

    def _stat(self, func):
        return float(func(self.lengths)) if len(self.lengths) else 0.0

    @property
    def max(self):
        return self._stat(np.max)

    @property
    def min(self):
        return self._stat(np.min)

    @property
    def mean(self):
        return self._stat(np.mean)

    @property
    def median(self):
        return self._stat(np.median)

    @property
    def sum(self):
        return float(self.lengths.sum())

    @property
    def bottom_count(self):
        return int(self.bottom.sum())

    @property
    def mesh_count(self):
        return int(len(self.bottom) - self.bottom.sum())

    @property
    def supported_volume(self):
        return float(np.dot(self.lengths, self.areas))

    def to_dict(self):
        return {
            "count": len(self),
            "max": self.max,
            "min": self.min,
            "mean": self.mean,
            "median": self.median,
            "sum": self.sum,
            "bottom_count": self.bottom_count,
            "non_bottom_count": self.mesh_count,
            "supported_volume": self.supported_volume,
        }

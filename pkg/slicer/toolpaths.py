import math

import numpy as np
from django.conf import settings
from shapely.geometry import LineString

from .domain import ToolpathMetrics
from .enums import InfillPattern

TURN_ANGLE = 1e-6


def _line_parts(geometry):
    if geometry.is_empty:
        return
    if geometry.geom_type == "LineString":
        yield geometry
    elif hasattr(geometry, "geoms"):
        for part in geometry.geoms:
            yield from _line_parts(part)


def hatch_segments(region, angle, spacing, phase=0.0):
    """
    Hatch lines of one family clipped to ``region``.

    Lines run along ``angle`` (degrees) at offsets (k + 1/2) spacing + phase
    measured along the family normal, so every layer shares one global hatch
    grid. Segments come back ordered by offset, then along the line.
    """
    if region.is_empty:
        return []
    theta = math.radians(angle)
    along = np.array([math.cos(theta), math.sin(theta)])
    across = np.array([-math.sin(theta), math.cos(theta)])
    minx, miny, maxx, maxy = region.bounds
    corners = np.array([[minx, miny], [maxx, miny], [maxx, maxy], [minx, maxy]])
    offsets, extents = corners @ across, corners @ along
    first = math.ceil((offsets.min() - phase) / spacing - 0.5)
    last = math.floor((offsets.max() - phase) / spacing - 0.5)
    start, stop = extents.min() - 1.0, extents.max() + 1.0

    segments = []
    for k in range(first, last + 1):
        offset = (k + 0.5) * spacing + phase
        base = offset * across
        line = LineString([base + start * along, base + stop * along])
        pieces = []
        for part in _line_parts(region.intersection(line)):
            coords = np.asarray(part.coords)
            a, b = coords[0], coords[-1]
            if np.linalg.norm(b - a) <= 0:
                continue
            if (b - a) @ along < 0:
                a, b = b, a
            pieces.append((a @ along, a, b))
        pieces.sort(key=lambda item: item[0])
        segments.extend((a, b) for _, a, b in pieces)
    return segments


def link_segments(segments):
    """Greedy nearest-endpoint ordering; returns oriented segments in path order."""
    if not segments:
        return []
    remaining = list(segments[1:])
    path = [segments[0]]
    while remaining:
        tail = path[-1][1]
        starts = np.array([s[0] for s in remaining])
        ends = np.array([s[1] for s in remaining])
        to_start = np.linalg.norm(starts - tail, axis=1)
        to_end = np.linalg.norm(ends - tail, axis=1)
        i_start, i_end = int(np.argmin(to_start)), int(np.argmin(to_end))
        if to_end[i_end] < to_start[i_start]:
            a, b = remaining.pop(i_end)
            path.append((b, a))
        else:
            path.append(remaining.pop(i_start))
    return path


def count_turns(path):
    """Direction changes along the polyline through the linked segments."""
    points = [path[0][0]]
    for a, b in path:
        for point in (a, b):
            if np.linalg.norm(point - points[-1]) > 1e-12:
                points.append(point)
    if len(points) < 3:
        return 0
    steps = np.diff(np.array(points), axis=0)
    cross = steps[:-1, 0] * steps[1:, 1] - steps[:-1, 1] * steps[1:, 0]
    dot = np.einsum("ij,ij->i", steps[:-1], steps[1:])
    return int(np.count_nonzero(np.abs(np.arctan2(cross, dot)) > TURN_ANGLE))


def infill(layer, pattern=InfillPattern.LINE, spacing=None, *, line_width=None):
    """
    Hatch ``layer``'s solid region and measure the toolpath.

    L_T sums the clipped hatch segments; n_point counts direction changes
    along each family's linked path; r_infill = min(1, L_T w / area).
    """
    config = settings.GRASPPRINT
    pattern = InfillPattern(pattern)
    spacing = config["INFILL_SPACING"] if spacing is None else spacing
    line_width = config["LINE_WIDTH"] if line_width is None else line_width
    if spacing <= 0:
        raise ValueError("Infill spacing must be positive.")

    region = layer.region
    ordered, length, turns = [], 0.0, 0
    for angle, phase in pattern.families:
        hatches = hatch_segments(region, angle, spacing, phase * spacing)
        family = link_segments(hatches)
        if not family:
            continue
        length += float(sum(np.linalg.norm(b - a) for a, b in family))
        turns += count_turns(family)
        ordered.extend(family)

    area = float(region.area)
    rate = min(1.0, length * line_width / area) if area > 0 and length > 0 else 0.0
    return ToolpathMetrics(
        pattern=pattern,
        spacing=float(spacing),
        length=length,
        turns=turns,
        infill_rate=rate,
        segments=tuple((tuple(a), tuple(b)) for a, b in ordered),
    )

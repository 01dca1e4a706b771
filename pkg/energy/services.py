import logging

import numpy as np
from django.conf import settings
from scipy.integrate import trapezoid

from .domain import EnergyReport, GeometricError, PowerLog
from .enums import AssociatedError, IsolatedError, ThermalModel
from .exceptions import EnergyModelError

logger = logging.getLogger(__name__)

MM3_TO_M3 = 1e-9


def melting_energy(material, volume, temperature=None):
    """
    Energy (kJ) to heat ``volume`` mm^3 of filament from ambient to
    ``temperature`` (default: the melt point) and melt it.
    """
    if volume < 0:
        raise EnergyModelError("Printed volume must be non-negative.")
    target = material.melt_temperature if temperature is None else temperature
    mass = material.density * volume * MM3_TO_M3
    heating = material.specific_heat * (target - material.ambient_temperature)
    return float(mass * (heating + material.latent_heat))


def print_time(volume, infill_rate, filament_area, velocity):
    """t_T = r_infill V_T / (S_A V_F) in seconds."""
    if velocity <= 0:
        raise EnergyModelError("Print velocity must be positive.")
    if filament_area <= 0:
        raise EnergyModelError("Filament cross-section must be positive.")
    if not 0 < infill_rate <= 1:
        raise EnergyModelError("Infill rate must lie in (0, 1].")
    return float(infill_rate * volume / (filament_area * velocity))


def print_time_from_length(length, velocity):
    if velocity <= 0:
        raise EnergyModelError("Print velocity must be positive.")
    return float(length / velocity)


def integrate_power(log):
    """Trapezoidal energy (kJ) of a PowerLog, summed interval by interval."""
    if not isinstance(log, PowerLog):
        log = PowerLog(*log)
    if len(log) < 2:
        raise EnergyModelError("A power log needs at least 2 samples.")
    return float(trapezoid(log.powers, log.times)) / 1000.0


def geometric_error(deviations, layer_sizes=None):
    """
    epsilon_geometric = max over facets of ||(eps_x, eps_y)||.

    Returns a GeometricError holding the value, the argmax facet and the
    tolerance classes the deviations determine: line profile (the largest
    norm), roundness (largest minus smallest norm) and location (norm of
    the mean deviation). With ``layer_sizes``, the facet count of each
    consecutive layer, parallelism is the spread of the per-layer maxima.
    """
    deviations = np.asarray(deviations, dtype=float).reshape(-1, 2)
    if not len(deviations):
        raise EnergyModelError("Geometric error needs at least one facet deviation.")
    norms = np.hypot(deviations[:, 0], deviations[:, 1])
    facet = int(np.argmax(norms))
    isolated = {
        IsolatedError.LINE.value: float(norms[facet]),
        IsolatedError.ROUNDNESS.value: float(norms[facet] - norms.min()),
    }
    shift = deviations.mean(axis=0)
    associated = {AssociatedError.LOCATION.value: float(np.hypot(*shift))}
    if layer_sizes is not None:
        sizes = np.asarray(layer_sizes, dtype=np.int64)
        if sizes.sum() != len(deviations) or np.any(sizes < 0):
            raise EnergyModelError(
                f"Layer sizes add up to {sizes.sum()}, "
                f"expected {len(deviations)} facets."
            )
        chunks = np.split(norms, np.cumsum(sizes)[:-1])
        peaks = [chunk.max() for chunk in chunks if len(chunk)]
        associated[AssociatedError.PARALLELISM.value] = float(max(peaks) - min(peaks))
    return GeometricError(
        value=float(norms[facet]),
        facet=facet,
        deviations=deviations,
        isolated=isolated,
        associated=associated,
    )


def boundary_segments(layer):
    """(start, end) arrays for every edge of every loop in ``layer``."""
    if layer.is_empty:
        return np.zeros((0, 2)), np.zeros((0, 2))
    starts = np.vstack(layer.polygons)
    ends = np.vstack([np.roll(loop, -1, axis=0) for loop in layer.polygons])
    return starts, ends


def linear_surrogate(layer, gradient, thickness, coefficient):
    """Deviation magnitude coeff * grad T * d, identical for every segment."""
    starts, _ = boundary_segments(layer)
    return np.full(len(starts), coefficient * gradient * thickness)


THERMAL_MODELS = {ThermalModel.LINEAR: linear_surrogate}


def thermal_deviation(layer, gradient, thickness, coefficient=None, model=None):
    """
    Per-segment in-plane deviations (k x 2) of ``layer``'s boundary.

    Each deviation points along the segment's outward normal with the
    magnitude given by ``model`` (a ThermalModel value or a callable with the
    signature of ``linear_surrogate``).
    """
    if coefficient is None:
        coefficient = settings.GRASPPRINT["THERMAL_COEFFICIENT"]
    if coefficient < 0:
        raise EnergyModelError("Thermal coefficient must be non-negative.")
    if model is None or isinstance(model, str):
        model = THERMAL_MODELS[ThermalModel(model or ThermalModel.LINEAR)]
    magnitudes = np.asarray(model(layer, gradient, thickness, coefficient), float)

    starts, ends = boundary_segments(layer)
    edges = ends - starts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    lengths[lengths == 0] = 1.0
    # right of travel is outside for CCW solids and CW holes alike
    normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
    return normals * magnitudes[:, None]


def stack_deviation(stack, gradient, thickness, coefficient=None, model=None):
    """Thermal deviations of every boundary segment of every layer, stacked."""
    chunks = [
        thermal_deviation(layer, gradient, thickness, coefficient, model)
        for layer in stack
    ]
    return np.vstack(chunks) if chunks else np.zeros((0, 2))


def analytic_energy(
    material,
    volume,
    *,
    infill_rate=None,
    velocity=None,
    working_power=None,
    nozzle_temperature=None,
    layer_thickness=None,
    line_width=None,
    length=None,
):
    """
    Analytic print energy: melting plus working power over the print time.

    With ``length`` the time is length / velocity. Otherwise the volume is
    laid down through a bead of cross-section ``layer_thickness * line_width``
    (or the filament area when no thickness is given).
    """
    printer = settings.GRASPPRINT["PRINTER"]
    infill_rate = printer["infill_rate"] if infill_rate is None else infill_rate
    velocity = printer["feed_velocity"] if velocity is None else velocity
    power = printer["working_power"] if working_power is None else working_power
    line_width = printer["line_width"] if line_width is None else line_width

    melting = melting_energy(material, infill_rate * volume, nozzle_temperature)
    if length is not None:
        seconds = print_time_from_length(length, velocity)
    else:
        area = (
            material.filament_area
            if layer_thickness is None
            else layer_thickness * line_width
        )
        seconds = print_time(volume, infill_rate, area, velocity)
    return EnergyReport(
        melting=melting, print_time=seconds, motion=power * seconds / 1000.0
    )


def window_energy(log, start, end):
    """Energy (kJ) of the piecewise-linear power signal over [start, end]."""
    inner = (log.times > start) & (log.times < end)
    times = np.concatenate([[start], log.times[inner], [end]])
    powers = np.interp(times, log.times, log.powers)
    return float(trapezoid(powers, times)) / 1000.0


def layer_energies_from_log(log, layer_times):
    """
    Split a measured log across layers by their share of the print time.

    Layer i owns the window of the log proportional to layer_times[i]; the
    per-layer energies sum to integrate_power(log).
    """
    shares = np.asarray(layer_times, dtype=float)
    if not len(shares) or np.any(shares < 0) or shares.sum() <= 0:
        raise EnergyModelError("Layer times must be non-negative with a positive sum.")
    if len(log) < 2:
        raise EnergyModelError("A power log needs at least 2 samples.")
    edges = log.times[0] + np.concatenate([[0.0], np.cumsum(shares)]) * (
        log.duration / shares.sum()
    )
    edges[-1] = log.times[-1]
    energies = np.array(
        [window_energy(log, a, b) for a, b in zip(edges[:-1], edges[1:])]
    )
    logger.debug(
        "Aligned %d-sample log to %d layer(s): %.6g kJ",
        len(log),
        len(shares),
        energies.sum(),
    )
    return energies

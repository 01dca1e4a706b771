import numpy as np

from slicer.masks import feature_size, feature_vector, rasterize_lcm

from .domain import PROCESS_FIELDS


def feature_width(kernels=None):
    return feature_size(kernels) + len(PROCESS_FIELDS)


def layer_features(layer, frame, process, *, resolution=None, kernels=None):
    """Mask features of one layer followed by [h_n, S_section, T_n, grad T, V_F, d]."""
    lcm = rasterize_lcm(layer, frame, resolution)
    tail = [
        layer.normalized_height,
        layer.section_area,
        process.nozzle_temperature,
        process.temperature_gradient,
        process.velocity,
        process.layer_thickness,
    ]
    return np.concatenate([feature_vector(lcm, kernels), tail])


def stack_features(stack, process, *, resolution=None, kernels=None):
    """One feature row per layer of ``stack``, all rasterized in its shared frame."""
    if not len(stack):
        return np.zeros((0, feature_width(kernels)))
    return np.vstack(
        [
            layer_features(
                layer, stack.frame, process, resolution=resolution, kernels=kernels
            )
            for layer in stack
        ]
    )

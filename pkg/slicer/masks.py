import numpy as np
import shapely
from django.conf import settings
from scipy.signal import correlate2d
from shapely.geometry import Polygon

from .domain import LCM

KERNELS = {
    "identity": np.array([[0, 0, 0], [0, 1, 0], [0, 0, 0]], dtype=float),
    "sobel_x": np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float),
    "sobel_y": np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=float),
    "laplacian": np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], dtype=float),
}

POOLED_SIZE = 4


def pixel_centers(frame, resolution):
    """
    Pixel-center coordinates of a ``resolution`` x ``resolution`` raster.

    Row 0 is the top (max y) of the frame, column 0 its left edge.
    """
    xmin, ymin, xmax, ymax = frame
    columns = xmin + (np.arange(resolution) + 0.5) * (xmax - xmin) / resolution
    rows = ymax - (np.arange(resolution) + 0.5) * (ymax - ymin) / resolution
    return np.meshgrid(columns, rows)


def rasterize_lcm(layer, frame, resolution=None):
    """
    Even-odd mask of ``layer`` over the model-wide XY ``frame``.

    A pixel is set when its center lies inside an odd number of loops. An
    empty layer gives an all-zero mask.
    """
    if resolution is None:
        resolution = settings.GRASPPRINT["MASK_RESOLUTION"]
    if resolution < 8:
        raise ValueError("Mask resolution must be at least 8.")
    xs, ys = pixel_centers(frame, resolution)
    parity = np.zeros((resolution, resolution), dtype=np.uint8)
    for loop in layer.polygons:
        parity ^= shapely.contains_xy(Polygon(loop), xs, ys).astype(np.uint8)
    return LCM(mask=parity, frame=frame)


def conv_features(lcm, kernels=None):
    """
    Stack of 3x3 kernel responses over the mask (unit stride, zero padding).

    ``kernels`` maps names to 3x3 arrays and defaults to KERNELS.
    """
    kernels = KERNELS if kernels is None else kernels
    mask = np.asarray(lcm.mask if isinstance(lcm, LCM) else lcm, dtype=float)
    responses = []
    for name, kernel in kernels.items():
        kernel = np.asarray(kernel, dtype=float)
        if kernel.shape != (3, 3):
            raise ValueError(f"Kernel '{name}' must be 3x3.")
        responses.append(
            correlate2d(mask, kernel, mode="same", boundary="fill", fillvalue=0.0)
        )
    return np.stack(responses)


def average_pool(image, size):
    """Mean over a size x size grid of (nearly) equal blocks."""
    image = np.asarray(image, dtype=float)
    row_blocks = np.array_split(np.arange(image.shape[0]), size)
    col_blocks = np.array_split(np.arange(image.shape[1]), size)
    return np.array(
        [[image[np.ix_(r, c)].mean() for c in col_blocks] for r in row_blocks]
    )


def feature_vector(lcm, kernels=None, pooled=POOLED_SIZE):
    """
    Multi-scale mask feature: kernel responses at full and half resolution,
    each average-pooled to ``pooled`` x ``pooled`` and flattened.
    """
    mask = np.asarray(lcm.mask, dtype=float)
    half = average_pool(mask, mask.shape[0] // 2)
    scales = []
    for image in (mask, half):
        stack = conv_features(image, kernels)
        scales.extend(average_pool(response, pooled).ravel() for response in stack)
    return np.concatenate(scales)


def feature_size(kernels=None, pooled=POOLED_SIZE):
    return 2 * len(KERNELS if kernels is None else kernels) * pooled * pooled

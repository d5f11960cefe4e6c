"""Edge extraction: difference-of-Gaussians over luminance.

The input is blurred at two scales (sigma and k * sigma), the absolute
difference is normalized to its own maximum and thresholded. Output is a
binary dark-on-white image ready for contour tracing.

Both kernels are truncated at radius ceil(2 * sigma) and renormalized, so
the response to a feature is exactly zero outside that radius. That makes
the spatial support of an edge predictable, which the tests lean on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from .raster import RasterImage, gray_image


@dataclass(frozen=True)
class EdgeParams:
    sigma: float = 1.0
    k: float = 1.6
    threshold: float = 0.1

    def __post_init__(self) -> None:
        if not (self.sigma > 0):
            raise ValueError("sigma must be positive")
        if not (self.k > 1.0):
            raise ValueError("k must exceed 1")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie in (0, 1)")


def _kernel(sigma: float, radius: int) -> np.ndarray:
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return k / k.sum()


def _blur(values: np.ndarray, sigma: float, radius: int) -> np.ndarray:
    k = _kernel(sigma, radius)
    # replicate edges; separable passes over rows then columns
    tmp = convolve1d(values, k, axis=1, mode="nearest")
    return convolve1d(tmp, k, axis=0, mode="nearest")


def extract_sketch(image: RasterImage, params: EdgeParams = EdgeParams()) -> RasterImage:
    """Binary edge map of ``image``: edges black (0), background white (255)."""
    lum = image.luminance()
    if lum.min() == lum.max():
        # constant image: the response would be pure rounding noise, and
        # normalizing by its maximum would blow that noise up to full scale
        return gray_image(np.full(lum.shape, 255, dtype=np.uint8))
    radius = math.ceil(2.0 * params.sigma)
    narrow = _blur(lum, params.sigma, radius)
    wide = _blur(lum, params.k * params.sigma, radius)
    response = np.abs(narrow - wide)
    peak = response.max()
    if peak <= 0.0:
        return gray_image(np.full(lum.shape, 255, dtype=np.uint8))
    response /= peak
    edges = response > params.threshold
    return gray_image(np.where(edges, 0, 255).astype(np.uint8))

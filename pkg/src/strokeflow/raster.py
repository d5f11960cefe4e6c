"""Raster image container and PNG input/output."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import EmptyImage


@dataclass(frozen=True, eq=False)
class RasterImage:
    """An RGB image as a read-only (height, width, 3) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.dtype != np.uint8:
            raise EmptyImage(f"expected (h, w, 3) uint8 pixels, got {px.shape} {px.dtype}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise EmptyImage("image has zero pixels")
        px = np.ascontiguousarray(px).copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def luminance(self) -> np.ndarray:
        """Per-pixel luma as float64 in [0, 255].

        Integer-weighted (299 r + 587 g + 114 b) / 1000 so that the value is
        an exact function of the channel combination, not of float rounding.
        """
        px = self.pixels.astype(np.int64)
        return (299 * px[:, :, 0] + 587 * px[:, :, 1] + 114 * px[:, :, 2]) / 1000.0

    @property
    def is_gray(self) -> bool:
        px = self.pixels
        return bool(np.array_equal(px[:, :, 0], px[:, :, 1]) and np.array_equal(px[:, :, 1], px[:, :, 2]))


def gray_image(values: np.ndarray) -> RasterImage:
    """Build an image from a (h, w) uint8 array replicated to RGB."""
    v = np.asarray(values, dtype=np.uint8)
    return RasterImage(np.repeat(v[:, :, None], 3, axis=2))


def solid_image(width: int, height: int, color: tuple[int, int, int]) -> RasterImage:
    px = np.empty((height, width, 3), dtype=np.uint8)
    px[:, :] = color
    return RasterImage(px)


def load_png(path: str) -> RasterImage:
    with Image.open(path) as im:
        rgb = im.convert("RGB")
        return RasterImage(np.asarray(rgb, dtype=np.uint8))


def save_png(image: RasterImage | np.ndarray, path: str, *, fast: bool = False) -> None:
    """Write an image (RasterImage or HxWx3 uint8 array) as PNG.

    ``fast`` trades file size for encode speed; useful for frame dumps.
    """
    arr = image.pixels if isinstance(image, RasterImage) else np.asarray(image, dtype=np.uint8)
    im = Image.fromarray(arr, mode="RGB")
    if fast:
        im.save(path, format="PNG", compress_level=1)
    else:
        im.save(path, format="PNG")

"""
Raster model shared by every fusewave module.

Pixels are held as a read-only float64 array in row-major (height, width)
order. Images that come from disk carry ``depth=8``; rasters produced by the
transform or by fusion carry ``depth=None`` because their values may leave the
8-bit range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class Extent:
    height: int
    width: int

    def as_tuple(self) -> Tuple[int, int]:
        return self.height, self.width


@dataclass(frozen=True, eq=False)
class Image:
    pixels: np.ndarray
    depth: Optional[int] = 8

    def __post_init__(self) -> None:
        array = np.array(self.pixels, dtype=np.float64, copy=True)
        if array.ndim != 2:
            raise ValueError(f"Image expects a 2-D raster, got shape {array.shape}")
        height, width = array.shape
        if width < 2 or height < 2:
            raise ValueError(f"Image must be at least 2x2, got {width}x{height}")
        if not np.all(np.isfinite(array)):
            raise ValueError("Image pixels must be finite")
        if self.depth == 8 and (array.min() < 0.0 or array.max() > 255.0):
            raise ValueError("8-bit image values must lie in [0, 255]")
        array.setflags(write=False)
        object.__setattr__(self, "pixels", array)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def extent(self) -> Extent:
        return Extent(self.height, self.width)

    def is_constant(self) -> bool:
        return bool(self.pixels.min() == self.pixels.max())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.depth == other.depth and np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]


def pad_to_multiple(img: Image, factor: int) -> Tuple[Image, Extent]:
    """Mirror-pad right and bottom so both dimensions divide by ``factor``.

    The edge pixel is not repeated, so padded row ``h - 1 + k`` equals row
    ``h - 1 - k``. Returns the padded image and the original extent.
    """
    if factor < 1:
        raise ValueError(f"Padding factor must be positive, got {factor}")
    extent = img.extent
    pad_rows = (-extent.height) % factor
    pad_cols = (-extent.width) % factor
    if pad_rows == 0 and pad_cols == 0:
        return img, extent
    padded = np.pad(img.pixels, ((0, pad_rows), (0, pad_cols)), mode="reflect")
    return Image(padded, depth=img.depth), extent


def crop_to_extent(img: Image, extent: Extent) -> Image:
    if extent.height > img.height or extent.width > img.width:
        raise ValueError(f"Cannot crop {img.width}x{img.height} image to {extent.width}x{extent.height}")
    if extent == img.extent:
        return img
    return Image(img.pixels[: extent.height, : extent.width], depth=img.depth)

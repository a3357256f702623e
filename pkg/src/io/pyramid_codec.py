"""
Binary container for DTCWT pyramids.

All integers and floats are little-endian::

    b"DTCW"  magic
    u16      version (1)
    u16      levels L
    u32 u32  source height, width
    u32 u32  lowpass rows, cols
    f64[]    lowpass plane, row-major
    repeat L times:
        u32 u32  subband rows, cols
        repeat for +15 +45 +75 -15 -45 -75:
            f64[] real plane, then f64[] imag plane
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from ..core.dtcwt import ORIENTATIONS, Pyramid, Subband, TransformError
from ..core.image_model import Extent

MAGIC = b"DTCW"
VERSION = 1
_FLOAT = np.dtype("<f8")
_HEADER = struct.Struct("<4sHHII")
_DIMS = struct.Struct("<II")


class ContainerError(Exception):
    pass


def _plane_bytes(plane: np.ndarray) -> bytes:
    return np.ascontiguousarray(plane, dtype=_FLOAT).tobytes()


def encode_pyramid(pyr: Pyramid) -> bytes:
    rows, cols = np.shape(pyr.lowpass)
    chunks: List[bytes] = [
        _HEADER.pack(MAGIC, VERSION, pyr.levels, pyr.source_extent.height, pyr.source_extent.width),
        _DIMS.pack(rows, cols),
        _plane_bytes(pyr.lowpass),
    ]
    for level in range(1, pyr.levels + 1):
        bands = pyr.level_subbands(level)
        chunks.append(_DIMS.pack(*bands[0].shape))
        for band in bands:
            chunks.append(_plane_bytes(band.real))
            chunks.append(_plane_bytes(band.imag))
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def unpack(self, layout: struct.Struct) -> Tuple:
        end = self.offset + layout.size
        if end > len(self.data):
            raise ContainerError("Truncated pyramid container")
        values = layout.unpack_from(self.data, self.offset)
        self.offset = end
        return values

    def plane(self, rows: int, cols: int) -> np.ndarray:
        count = rows * cols
        end = self.offset + count * _FLOAT.itemsize
        if end > len(self.data):
            raise ContainerError("Truncated pyramid container")
        values = np.frombuffer(self.data, dtype=_FLOAT, count=count, offset=self.offset)
        self.offset = end
        return values.reshape(rows, cols).astype(np.float64)


def decode_pyramid(data: bytes) -> Pyramid:
    reader = _Reader(data)
    magic, version, levels, height, width = reader.unpack(_HEADER)
    if magic != MAGIC:
        raise ContainerError(f"Not a pyramid container (magic {magic!r})")
    if version != VERSION:
        raise ContainerError(f"Unsupported container version {version}")
    lowpass = reader.plane(*reader.unpack(_DIMS))
    highpass: List[Subband] = []
    for level in range(1, levels + 1):
        rows, cols = reader.unpack(_DIMS)
        for orientation in ORIENTATIONS:
            real = reader.plane(rows, cols)
            imag = reader.plane(rows, cols)
            highpass.append(Subband(level, orientation, real, imag))
    if reader.offset != len(data):
        raise ContainerError(f"{len(data) - reader.offset} trailing bytes after pyramid data")
    try:
        return Pyramid(levels=levels, lowpass=lowpass, highpass=tuple(highpass), source_extent=Extent(height, width))
    except TransformError as exc:
        raise ContainerError(f"Inconsistent pyramid container: {exc}") from exc


def save_pyramid(pyr: Pyramid, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_pyramid(pyr))


def load_pyramid(path: Union[str, Path]) -> Pyramid:
    return decode_pyramid(Path(path).read_bytes())

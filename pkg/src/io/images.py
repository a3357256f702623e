"""
Grayscale image files: PGM (P2/P5, maxval <= 255) and 8-bit PNG.

PGM is parsed here directly so sample values are kept exactly as stored,
with no maxval rescaling. PNG goes through OpenCV.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Tuple, Union

import cv2
import numpy as np

from ..core.image_model import Image

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PGM_SUFFIXES = (".pgm",)
PNG_SUFFIXES = (".png",)


class ImageFormatError(Exception):
    pass


# ---------------------------------------------------------------- pgm ------

def _pgm_header(data: bytes) -> Tuple[List[bytes], int]:
    """Return the four header tokens and the offset just past them."""
    tokens: List[bytes] = []
    pos = 0
    size = len(data)
    while len(tokens) < 4:
        while pos < size and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= size:
            raise ImageFormatError("Truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < size and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _decode_pgm(data: bytes, path: Path) -> np.ndarray:
    tokens, pos = _pgm_header(data)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(f"Unsupported PNM type {magic!r} in {path}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"Malformed PGM header in {path}") from exc
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"Zero-dimension image in {path}")
    if maxval < 1 or maxval > 255:
        raise ImageFormatError(f"Unsupported bit depth in {path}: maxval {maxval}")
    count = width * height
    if magic == b"P5":
        body = data[pos + 1:pos + 1 + count]
        if len(body) != count:
            raise ImageFormatError(f"Truncated PGM data in {path}")
        values = np.frombuffer(body, dtype=np.uint8)
    else:
        text = b" ".join(
            line.split(b"#", 1)[0] for line in data[pos:].splitlines()
        )
        try:
            values = np.array([int(t) for t in text.split()], dtype=np.int64)
        except ValueError as exc:
            raise ImageFormatError(f"Malformed ASCII PGM data in {path}") from exc
        if values.size < count:
            raise ImageFormatError(f"Truncated PGM data in {path}")
        values = values[:count]
    if values.max(initial=0) > maxval:
        raise ImageFormatError(f"Sample exceeds maxval {maxval} in {path}")
    return values.reshape(height, width).astype(np.float64)


def _encode_pgm(pixels: np.ndarray) -> bytes:
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + pixels.astype(np.uint8).tobytes()


# ---------------------------------------------------------------- png ------

def _decode_png(path: Path) -> np.ndarray:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageFormatError(f"Unreadable image file {path}")
    if raw.dtype != np.uint8:
        raise ImageFormatError(f"Unsupported bit depth in {path}: {raw.dtype}")
    if raw.ndim == 3:
        # Palette images decode to BGR; accept them only when the palette is gray.
        if raw.shape[2] != 3 or not (
            np.array_equal(raw[..., 0], raw[..., 1]) and np.array_equal(raw[..., 1], raw[..., 2])
        ):
            raise ImageFormatError(f"Colour image rejected: {path}")
        raw = raw[..., 0]
    if raw.size == 0:
        raise ImageFormatError(f"Zero-dimension image in {path}")
    return raw.astype(np.float64)


# ---------------------------------------------------------------- api ------

def load_image(path: PathLike) -> Image:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in PGM_SUFFIXES + PNG_SUFFIXES:
        raise ImageFormatError(f"Unsupported image format: {path}")
    try:
        if suffix in PGM_SUFFIXES:
            pixels = _decode_pgm(path.read_bytes(), path)
        else:
            if not path.is_file():
                raise ImageFormatError(f"Unreadable image file {path}")
            pixels = _decode_png(path)
    except OSError as exc:
        raise ImageFormatError(f"Unreadable image file {path}: {exc}") from exc
    try:
        image = Image(pixels, depth=8)
    except ValueError as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc
    logger.debug("Loaded %s (%dx%d)", path, image.width, image.height)
    return image


def to_uint8(img: Image) -> np.ndarray:
    """Clamp to [0, 255] and round half-up."""
    return np.floor(np.clip(img.pixels, 0.0, 255.0) + 0.5).astype(np.uint8)


def save_image(img: Image, path: PathLike) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    pixels = to_uint8(img)
    if suffix in PGM_SUFFIXES:
        path.write_bytes(_encode_pgm(pixels))
    elif suffix in PNG_SUFFIXES:
        if not path.parent.is_dir():
            raise OSError(f"Output directory does not exist: {path.parent}")
        if not cv2.imwrite(str(path), pixels):
            raise OSError(f"Failed to write {path}")
    else:
        raise ImageFormatError(f"Unsupported output format: {path}")
    logger.debug("Saved %s", path)

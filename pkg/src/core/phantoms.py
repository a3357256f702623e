"""
Synthetic registered CT/MR-style head phantoms.

The two images share one analytic geometry but show complementary detail.
The CT-like image has a bright skull, calcifications and flat soft tissue.
The MR-like image has a dark skull, gray/white matter contrast, bright
ventricles and a lesion that the CT-like image does not show.
``samples/*_phantom.pgm`` are the 256x256 output of these formulas.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .image_model import Image

MIN_SIZE = 16


def _grid(size: int) -> Tuple[np.ndarray, np.ndarray]:
    coords = (np.arange(size) - (size - 1) / 2.0) / (size / 2.0)
    v, u = np.meshgrid(coords, coords, indexing="ij")
    return u, v


def _ellipse(u: np.ndarray, v: np.ndarray, cu: float, cv: float, ru: float, rv: float) -> np.ndarray:
    return ((u - cu) / ru) ** 2 + ((v - cv) / rv) ** 2


def _quantise(values: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0.0, 255.0)


def make_phantom_pair(size: int = 256) -> Tuple[Image, Image]:
    if size < MIN_SIZE:
        raise ValueError(f"Phantom size must be >= {MIN_SIZE}, got {size}")
    u, v = _grid(size)
    skin = _ellipse(u, v, 0.0, 0.0, 0.90, 0.98) > 1.0
    scalp = _ellipse(u, v, 0.0, 0.0, 0.86, 0.94) > 1.0
    bone = _ellipse(u, v, 0.0, 0.0, 0.78, 0.86) > 1.0
    white = _ellipse(u, v, 0.0, 0.05, 0.55, 0.65) <= 1.0
    ventricle = (_ellipse(u, v, 0.14, -0.05, 0.08, 0.20) <= 1.0) | (_ellipse(u, v, -0.14, -0.05, 0.08, 0.20) <= 1.0)
    calcification = (_ellipse(u, v, 0.30, -0.35, 0.035, 0.035) <= 1.0) | (_ellipse(u, v, -0.25, 0.40, 0.03, 0.03) <= 1.0)
    lesion = _ellipse(u, v, -0.35, 0.20, 0.09, 0.09) <= 1.0

    ct = 75.0 + 5.0 * np.sin(7.0 * u) * np.cos(5.0 * v)
    ct = np.where(ventricle, 55.0, ct)
    ct = np.where(calcification, 210.0, ct)
    ct = np.where(bone, 235.0, ct)
    ct = np.where(scalp, 40.0, ct)
    ct = np.where(skin, 0.0, ct)

    mr = 120.0 + 18.0 * np.sin(9.0 * u + 4.0 * v)
    mr = np.where(white, 165.0 + 10.0 * np.cos(11.0 * v) * np.sin(6.0 * u), mr)
    mr = np.where(ventricle, 230.0, mr)
    mr = np.where(lesion, 250.0, mr)
    mr = np.where(bone, 25.0, mr)
    mr = np.where(scalp, 170.0, mr)
    mr = np.where(skin, 0.0, mr)

    return Image(_quantise(ct)), Image(_quantise(mr))

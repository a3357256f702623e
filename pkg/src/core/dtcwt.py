"""
Two-dimensional dual-tree complex wavelet transform.

Filtering is separable: columns first, then rows through the transpose.
Only the index arrays of each stage are cached, per signal length.

Level 1 is an undecimated zero-phase biorthogonal pair with half-sample
symmetric extension. The two trees are its even and odd polyphase samples,
interleaved in the output planes. Levels >= 2 apply the Q-shift pair to
both trees at once. Tree b is mirrored onto the end of tree a, which gives
the cross-tree symmetric extension, and the two-channel bank is run
periodically over the result. That joint stage is orthogonal, so the
inverse applies its transpose.

The four tree outputs of each oriented plane are paired into two complex
subbands (+theta and -theta) by the normalised sum/difference rule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .filters import FilterBank, default_filter_bank, level1_taps
from .image_model import Extent, Image, crop_to_extent

logger = logging.getLogger(__name__)

MAX_LEVELS = 6
_SQRT_HALF = np.sqrt(0.5)


class TransformError(ValueError):
    pass


class Orientation(IntEnum):
    P15 = 15
    P45 = 45
    P75 = 75
    N15 = -15
    N45 = -45
    N75 = -75


ORIENTATIONS: Tuple[Orientation, ...] = (
    Orientation.P15,
    Orientation.P45,
    Orientation.P75,
    Orientation.N15,
    Orientation.N45,
    Orientation.N75,
)

# Analysis planes per level: (row highpass, both highpass, column highpass).
_PLANE_ORIENTATIONS = (
    (Orientation.P15, Orientation.N15),
    (Orientation.P45, Orientation.N45),
    (Orientation.P75, Orientation.N75),
)


@dataclass(frozen=True, eq=False)
class Subband:
    level: int
    orientation: Orientation
    real: np.ndarray
    imag: np.ndarray

    def __post_init__(self) -> None:
        if self.level < 1:
            raise TransformError(f"Subband level must be >= 1, got {self.level}")
        if np.shape(self.real) != np.shape(self.imag):
            raise TransformError(
                f"Subband {self.level}/{int(self.orientation)} real and imag shapes differ: "
                f"{np.shape(self.real)} vs {np.shape(self.imag)}"
            )
        object.__setattr__(self, "orientation", Orientation(self.orientation))

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(np.shape(self.real))  # type: ignore[return-value]

    @property
    def coefficients(self) -> np.ndarray:
        return self.real + 1j * self.imag

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.real, self.imag)

    @property
    def phase(self) -> np.ndarray:
        return np.arctan2(self.imag, self.real)

    def energy(self) -> float:
        return float(np.sum(self.real * self.real) + np.sum(self.imag * self.imag))


@dataclass(frozen=True, eq=False)
class Pyramid:
    levels: int
    lowpass: np.ndarray
    highpass: Tuple[Subband, ...]
    source_extent: Extent

    def __post_init__(self) -> None:
        object.__setattr__(self, "highpass", tuple(self.highpass))
        self.validate()

    @property
    def padded_extent(self) -> Extent:
        rows, cols = np.shape(self.lowpass)
        scale = 1 << (self.levels - 1)
        return Extent(rows * scale, cols * scale)

    def validate(self) -> None:
        if self.levels < 1 or self.levels > MAX_LEVELS:
            raise TransformError(f"Pyramid levels must be in [1, {MAX_LEVELS}], got {self.levels}")
        if np.ndim(self.lowpass) != 2:
            raise TransformError("Pyramid lowpass must be a 2-D plane")
        if len(self.highpass) != 6 * self.levels:
            raise TransformError(
                f"Pyramid with {self.levels} levels needs {6 * self.levels} subbands, got {len(self.highpass)}"
            )
        padded = self.padded_extent
        for index, band in enumerate(self.highpass):
            level = index // 6 + 1
            expected = ORIENTATIONS[index % 6]
            if band.level != level or band.orientation != expected:
                raise TransformError(
                    f"Subband {index} should be level {level} at {int(expected)} degrees, "
                    f"got level {band.level} at {int(band.orientation)}"
                )
            want = (padded.height >> level, padded.width >> level)
            if band.shape != want:
                raise TransformError(f"Level {level} subband has shape {band.shape}, expected {want}")
        if self.source_extent.height > padded.height or self.source_extent.width > padded.width:
            raise TransformError("Source extent exceeds the transformed extent")

    def subband(self, level: int, orientation: int) -> Subband:
        if level < 1 or level > self.levels:
            raise KeyError(level)
        return self.highpass[(level - 1) * 6 + ORIENTATIONS.index(Orientation(orientation))]

    def level_subbands(self, level: int) -> Tuple[Subband, ...]:
        if level < 1 or level > self.levels:
            raise KeyError(level)
        start = (level - 1) * 6
        return self.highpass[start:start + 6]

    def energy(self) -> float:
        return float(np.sum(self.lowpass * self.lowpass)) + sum(band.energy() for band in self.highpass)


# ---------------------------------------------------------- operators --------
#
# Filters act along axis 0 by gathering one shifted copy of the input per
# tap, so memory stays proportional to the image. Row filtering runs on the
# transpose.

def _half_sample_index(index: np.ndarray, length: int) -> np.ndarray:
    period = np.mod(index, 2 * length)
    return np.where(period >= length, 2 * length - 1 - period, period)


@lru_cache(maxsize=32)
def _symmetric_indices(length: int, size: int) -> np.ndarray:
    rows = np.arange(length)[:, None]
    index = _half_sample_index(rows + size // 2 - np.arange(size)[None, :], length)
    index.setflags(write=False)
    return index


def _symmetric_filter(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Zero-phase filtering of every column with half-sample symmetric extension."""
    index = _symmetric_indices(x.shape[0], taps.size)
    out = np.zeros(x.shape)
    for k, weight in enumerate(taps):
        out += weight * x[index[:, k]]
    return out


@lru_cache(maxsize=32)
def _qshift_layout(length: int, size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index arrays for the joint two-tree Q-shift stage on an interleaved column.

    Input and output interleave tree a (even samples) with tree b (odd
    samples). ``gather`` joins tree a with tree b reversed, which gives the
    cross-tree symmetric extension. The two-channel bank runs periodically
    over the joined signal, ``taps[k, t]`` being the sample that tap ``t``
    reads for output ``k``, and ``scatter`` puts its outputs back in
    interleaved order. The stage is orthogonal.
    """
    if length % 4:
        raise TransformError(f"Q-shift stage needs a length divisible by 4, got {length}")
    half = length // 2
    gather = np.concatenate([np.arange(0, length, 2), np.arange(1, length, 2)[::-1]])
    quarter = np.arange(half // 2)
    scatter = np.empty(half, dtype=np.intp)
    scatter[0::2] = quarter
    scatter[1::2] = half - 1 - quarter
    taps = np.mod(2 * np.arange(half)[:, None] + size // 2 - np.arange(size)[None, :], length)
    for array in (gather, scatter, taps):
        array.setflags(write=False)
    return gather, scatter, taps


def _qshift_analysis(x: np.ndarray, bank: FilterBank) -> Tuple[np.ndarray, np.ndarray]:
    pair = bank.qshift_analysis_a
    gather, scatter, index = _qshift_layout(x.shape[0], pair.lo.size)
    joined = x[gather]
    outputs = []
    for taps in (pair.lo, pair.hi):
        out = np.zeros((index.shape[0],) + x.shape[1:])
        for k, weight in enumerate(taps):
            out += weight * joined[index[:, k]]
        outputs.append(out[scatter])
    return outputs[0], outputs[1]


def _qshift_synthesis(lo: np.ndarray, hi: np.ndarray, bank: FilterBank) -> np.ndarray:
    """Transpose of ``_qshift_analysis``."""
    pair = bank.qshift_analysis_a
    length = 2 * lo.shape[0]
    gather, scatter, index = _qshift_layout(length, pair.lo.size)
    joined = np.zeros((length,) + lo.shape[1:])
    for taps, coefficients in ((pair.lo, lo), (pair.hi, hi)):
        ordered = np.empty(coefficients.shape)
        ordered[scatter] = coefficients
        for k, weight in enumerate(taps):
            # Each tap column hits distinct samples.
            joined[index[:, k]] += weight * ordered
    out = np.empty(joined.shape)
    out[gather] = joined
    return out


def _rows(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    return _symmetric_filter(x.T, taps).T


# ------------------------------------------------------- tree pairing --------

def _q2c(plane: np.ndarray) -> Tuple[Tuple[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]:
    a = plane[0::2, 0::2]
    b = plane[0::2, 1::2]
    c = plane[1::2, 0::2]
    d = plane[1::2, 1::2]
    positive = (_SQRT_HALF * (a - d), _SQRT_HALF * (b + c))
    negative = (_SQRT_HALF * (a + d), _SQRT_HALF * (b - c))
    return positive, negative


def _c2q(positive: Subband, negative: Subband) -> np.ndarray:
    rows, cols = positive.shape
    plane = np.empty((2 * rows, 2 * cols))
    plane[0::2, 0::2] = _SQRT_HALF * (positive.real + negative.real)
    plane[1::2, 1::2] = _SQRT_HALF * (negative.real - positive.real)
    plane[0::2, 1::2] = _SQRT_HALF * (positive.imag + negative.imag)
    plane[1::2, 0::2] = _SQRT_HALF * (positive.imag - negative.imag)
    return plane


# ----------------------------------------------------------- analysis --------

def _check_levels(levels: int) -> None:
    if isinstance(levels, bool) or not isinstance(levels, (int, np.integer)):
        raise TransformError(f"levels must be an integer, got {levels!r}")
    if levels < 1 or levels > MAX_LEVELS:
        raise TransformError(f"levels must be in [1, {MAX_LEVELS}], got {levels}")


def _check_divisible(extent: Extent, levels: int) -> None:
    factor = 1 << levels
    if extent.height % factor or extent.width % factor:
        raise TransformError(
            f"Image {extent.width}x{extent.height} is not divisible by {factor}; pad it first"
        )


def _analyse(pixels: np.ndarray, levels: int, bank: FilterBank) -> Tuple[np.ndarray, List[Tuple[np.ndarray, ...]]]:
    h0, h1, _, _ = level1_taps(bank)
    lo = _symmetric_filter(pixels, h0)
    hi = _symmetric_filter(pixels, h1)
    planes: List[Tuple[np.ndarray, ...]] = [(_rows(lo, h1), _rows(hi, h1), _rows(hi, h0))]
    lowpass = _rows(lo, h0)
    for _ in range(2, levels + 1):
        lo, hi = _qshift_analysis(lowpass, bank)
        lo_lo, lo_hi = _qshift_analysis(lo.T, bank)
        hi_lo, hi_hi = _qshift_analysis(hi.T, bank)
        planes.append((lo_hi.T, hi_hi.T, hi_lo.T))
        lowpass = lo_lo.T
    return lowpass, planes


def forward(
    img: Image,
    levels: int,
    *,
    source_extent: Optional[Extent] = None,
    bank: Optional[FilterBank] = None,
) -> Pyramid:
    """Decompose ``img`` into a lowpass plane and six complex subbands per level.

    ``source_extent`` records the unpadded size when ``img`` was padded by the
    caller. The inverse crops to it.
    """
    _check_levels(levels)
    _check_divisible(img.extent, levels)
    bank = bank or default_filter_bank()
    lowpass, planes = _analyse(img.pixels, levels, bank)
    highpass: List[Subband] = []
    for level, trio in enumerate(planes, start=1):
        positives: List[Subband] = []
        negatives: List[Subband] = []
        for plane, (pos_theta, neg_theta) in zip(trio, _PLANE_ORIENTATIONS):
            (pos_re, pos_im), (neg_re, neg_im) = _q2c(plane)
            positives.append(Subband(level, pos_theta, pos_re, pos_im))
            negatives.append(Subband(level, neg_theta, neg_re, neg_im))
        highpass.extend(positives + negatives)
    return Pyramid(
        levels=levels,
        lowpass=lowpass,
        highpass=tuple(highpass),
        source_extent=source_extent or img.extent,
    )


# ---------------------------------------------------------- synthesis --------

def _level_planes(pyr: Pyramid, level: int) -> List[np.ndarray]:
    bands = pyr.level_subbands(level)
    return [_c2q(bands[i], bands[i + 3]) for i in range(3)]


def inverse(pyr: Pyramid, *, bank: Optional[FilterBank] = None) -> Image:
    """Reconstruct the image and crop it to ``pyr.source_extent``."""
    pyr.validate()
    bank = bank or default_filter_bank()
    lowpass = np.asarray(pyr.lowpass, dtype=np.float64)
    for level in range(pyr.levels, 1, -1):
        row_high, diagonal, col_high = _level_planes(pyr, level)
        lo = _qshift_synthesis(lowpass.T, row_high.T, bank).T
        hi = _qshift_synthesis(col_high.T, diagonal.T, bank).T
        lowpass = _qshift_synthesis(lo, hi, bank)
    row_high, diagonal, col_high = _level_planes(pyr, 1)
    _, _, g0, g1 = level1_taps(bank)
    lo = _rows(lowpass, g0) + _rows(row_high, g1)
    hi = _rows(col_high, g0) + _rows(diagonal, g1)
    pixels = _symmetric_filter(lo, g0) + _symmetric_filter(hi, g1)
    return crop_to_extent(Image(pixels, depth=None), pyr.source_extent)


# ----------------------------------------------------- diagnostics ----------

def _plane_energies(planes: List[Tuple[np.ndarray, ...]], single_tree: bool) -> Dict[Tuple[int, int], float]:
    energies: Dict[Tuple[int, int], float] = {}
    for level, trio in enumerate(planes, start=1):
        for index, plane in enumerate(trio):
            if single_tree:
                tree_a = plane[0::2, 0::2]
                energies[(level, index)] = float(np.sum(tree_a * tree_a))
                continue
            for sign, (re, im) in enumerate(_q2c(plane)):
                energies[(level, 2 * index + sign)] = float(np.sum(re * re) + np.sum(im * im))
    return energies


def shift_sensitivity(
    img: Image,
    levels: int,
    shifts: Iterable[int] = range(4),
    *,
    single_tree: bool = False,
    bank: Optional[FilterBank] = None,
) -> np.ndarray:
    """Worst relative spread of subband energy under circular shifts, per level.

    Every (dy, dx) pair from ``shifts`` is applied. With ``single_tree`` the
    score uses only the real tree-a samples, which behave like a decimated
    real wavelet transform.
    """
    _check_levels(levels)
    _check_divisible(img.extent, levels)
    bank = bank or default_filter_bank()
    offsets = list(shifts)
    samples: Dict[Tuple[int, int], List[float]] = {}
    for dy in offsets:
        for dx in offsets:
            shifted = np.roll(img.pixels, (dy, dx), axis=(0, 1))
            _, planes = _analyse(shifted, levels, bank)
            for key, value in _plane_energies(planes, single_tree).items():
                samples.setdefault(key, []).append(value)
    floor = 1e-18 * max(1.0, float(np.sum(img.pixels * img.pixels)))
    scores = np.zeros(levels)
    for (level, _), values in samples.items():
        series = np.asarray(values)
        if series.max() <= floor:
            continue
        spread = (series.max() - series.min()) / series.mean()
        scores[level - 1] = max(scores[level - 1], spread)
    return scores

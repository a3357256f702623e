"""Weighted-average fusion of two pyramids, one weight per subband."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from .dtcwt import Pyramid, Subband


class FusionError(ValueError):
    pass


def weight_count(levels: int) -> int:
    return 1 + 6 * levels


def _check_unit_range(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)) or np.any(values < 0.0) or np.any(values > 1.0):
        raise FusionError(f"{what} must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class FusionWeights:
    lowpass_weight: float
    highpass_weights: np.ndarray

    def __post_init__(self) -> None:
        highpass = np.array(self.highpass_weights, dtype=np.float64).reshape(-1)
        if highpass.size == 0 or highpass.size % 6:
            raise FusionError(f"Highpass weight count must be a positive multiple of 6, got {highpass.size}")
        _check_unit_range(np.array([self.lowpass_weight], dtype=np.float64), "Lowpass weight")
        _check_unit_range(highpass, "Highpass weights")
        highpass.setflags(write=False)
        object.__setattr__(self, "lowpass_weight", float(self.lowpass_weight))
        object.__setattr__(self, "highpass_weights", highpass)

    @property
    def levels(self) -> int:
        return self.highpass_weights.size // 6

    def __len__(self) -> int:
        return 1 + self.highpass_weights.size

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.lowpass_weight], self.highpass_weights])

    def complement(self) -> "FusionWeights":
        return FusionWeights(1.0 - self.lowpass_weight, 1.0 - self.highpass_weights)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lowpass_weight": self.lowpass_weight,
            "highpass_weights": [float(v) for v in self.highpass_weights],
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "FusionWeights":
        return FusionWeights(
            lowpass_weight=float(data["lowpass_weight"]),
            highpass_weights=np.asarray(data["highpass_weights"], dtype=np.float64),
        )

    @staticmethod
    def uniform(levels: int, value: float = 0.5) -> "FusionWeights":
        return FusionWeights(value, np.full(6 * levels, value))


def weights_from_vector(x: Sequence[float], levels: int) -> FusionWeights:
    """Position 0 is the lowpass weight; the rest go level-major, orientation-minor."""
    vector = np.asarray(x, dtype=np.float64).reshape(-1)
    if vector.size != weight_count(levels):
        raise FusionError(
            f"{levels}-level fusion needs {weight_count(levels)} weights, got {vector.size}"
        )
    _check_unit_range(vector, "Weight vector entries")
    return FusionWeights(float(vector[0]), vector[1:])


def _blend(w: float, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return w * first + (1.0 - w) * second


def fuse_pyramids(p1: Pyramid, p2: Pyramid, w: FusionWeights) -> Pyramid:
    if p1.levels != p2.levels:
        raise FusionError(f"Pyramid levels differ: {p1.levels} vs {p2.levels}")
    if np.shape(p1.lowpass) != np.shape(p2.lowpass):
        raise FusionError(f"Lowpass shapes differ: {np.shape(p1.lowpass)} vs {np.shape(p2.lowpass)}")
    if p1.source_extent != p2.source_extent:
        raise FusionError("Pyramids describe different source extents")
    if w.levels != p1.levels:
        raise FusionError(f"Weights cover {w.levels} levels but the pyramids have {p1.levels}")

    fused = []
    for weight, first, second in zip(w.highpass_weights, p1.highpass, p2.highpass):
        if first.shape != second.shape or first.orientation != second.orientation:
            raise FusionError(f"Subband mismatch at level {first.level}")
        fused.append(Subband(
            first.level,
            first.orientation,
            _blend(float(weight), first.real, second.real),
            _blend(float(weight), first.imag, second.imag),
        ))
    return Pyramid(
        levels=p1.levels,
        lowpass=_blend(w.lowpass_weight, p1.lowpass, p2.lowpass),
        highpass=tuple(fused),
        source_extent=p1.source_extent,
    )

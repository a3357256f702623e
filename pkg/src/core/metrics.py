"""
Fusion quality metrics: entropy, RMSE, PSNR, SSIM, SD and MEAN.

SSIM comes in two forms. ``ssim_global`` is the global formula without the
cross-covariance term. ``ssim_standard`` is the usual windowed index, kept
for comparison. The six-objective fitness vector is in minimisation form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image_model import Image

PEAK = 255.0
SSIM_C1 = (0.01 * PEAK) ** 2
SSIM_C2 = (0.03 * PEAK) ** 2
SSIM_WINDOW = 8
PSNR_CAP = 1000.0
GRAY_LEVELS = 256


def _pair(reference: Image, test: Image) -> None:
    if reference.pixels.shape != test.pixels.shape:
        raise ValueError(
            f"Image dimensions differ: {reference.width}x{reference.height} vs {test.width}x{test.height}"
        )


def histogram(img: Image) -> np.ndarray:
    bins = np.clip(np.floor(img.pixels + 0.5), 0, GRAY_LEVELS - 1).astype(np.intp)
    return np.bincount(bins.ravel(), minlength=GRAY_LEVELS)


def entropy(img: Image) -> float:
    counts = histogram(img)
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log2(p))) + 0.0


def rmse(reference: Image, test: Image) -> float:
    _pair(reference, test)
    diff = reference.pixels - test.pixels
    return float(np.sqrt(np.mean(diff * diff)))


def psnr_from_rmse(value: float) -> float:
    if value == 0.0:
        return math.inf
    return float(10.0 * np.log10(PEAK ** 2 / value ** 2))


def psnr(reference: Image, test: Image) -> float:
    return psnr_from_rmse(rmse(reference, test))


def ssim_global(reference: Image, test: Image) -> float:
    _pair(reference, test)
    r, f = reference.pixels, test.pixels
    mu_r, mu_f = r.mean(), f.mean()
    sigma_r, sigma_f = r.std(), f.std()
    numerator = (2.0 * mu_f * mu_r + SSIM_C1) * (2.0 * sigma_f * sigma_r + SSIM_C2)
    denominator = (mu_f ** 2 + mu_r ** 2 + SSIM_C1) * (sigma_f ** 2 + sigma_r ** 2 + SSIM_C2)
    return float(numerator / denominator)


def ssim_standard(reference: Image, test: Image, window: int = SSIM_WINDOW) -> float:
    """Mean SSIM over every valid ``window`` x ``window`` block."""
    _pair(reference, test)
    size = (min(window, reference.height), min(window, reference.width))
    r = sliding_window_view(reference.pixels, size)
    f = sliding_window_view(test.pixels, size)
    axes = (-2, -1)
    mu_r = r.mean(axis=axes)
    mu_f = f.mean(axis=axes)
    var_r = r.var(axis=axes)
    var_f = f.var(axis=axes)
    cov = (r * f).mean(axis=axes) - mu_r * mu_f
    index = ((2.0 * mu_r * mu_f + SSIM_C1) * (2.0 * cov + SSIM_C2)) / (
        (mu_r ** 2 + mu_f ** 2 + SSIM_C1) * (var_r + var_f + SSIM_C2)
    )
    return float(index.mean())


def mean(img: Image) -> float:
    return float(np.mean(np.abs(img.pixels)))


def sd(img: Image) -> float:
    diff = img.pixels - mean(img)
    return float(np.sqrt(np.mean(diff * diff)))


def _capped(value: float) -> float:
    return PSNR_CAP if math.isinf(value) else value


def fitness_vector(fused: Image, src_a: Image, src_b: Image) -> np.ndarray:
    """[-E, mean RMSE, -mean PSNR, -SD, -SSIM(A,F), -SSIM(B,F)]; infinite PSNR counts as 1000 dB."""
    _pair(src_a, fused)
    _pair(src_b, fused)
    mean_rmse = 0.5 * (rmse(src_a, fused) + rmse(src_b, fused))
    mean_psnr = 0.5 * (_capped(psnr(src_a, fused)) + _capped(psnr(src_b, fused)))
    return np.array([
        -entropy(fused),
        mean_rmse,
        -mean_psnr,
        -sd(fused),
        -ssim_global(src_a, fused),
        -ssim_global(src_b, fused),
    ])


# ------------------------------------------------------------- report --------

def _json_number(value: Optional[float]) -> Any:
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


@dataclass(frozen=True)
class MetricsReport:
    entropy: float
    psnr: float
    rmse: float
    ssim_vs_a: float
    ssim_vs_b: Optional[float]
    sd: float
    mean: float
    rmse_vs_a: float
    rmse_vs_b: Optional[float]
    psnr_vs_a: float
    psnr_vs_b: Optional[float]
    ssim_standard_vs_a: Optional[float] = None
    ssim_standard_vs_b: Optional[float] = None

    FIELDS = (
        "entropy", "psnr", "rmse", "ssim_vs_a", "ssim_vs_b", "sd", "mean",
        "rmse_vs_a", "rmse_vs_b", "psnr_vs_a", "psnr_vs_b",
    )
    OPTIONAL_FIELDS = ("ssim_standard_vs_a", "ssim_standard_vs_b")

    def to_dict(self) -> Dict[str, Any]:
        data = {name: _json_number(getattr(self, name)) for name in self.FIELDS}
        for name in self.OPTIONAL_FIELDS:
            value = getattr(self, name)
            if value is not None:
                data[name] = _json_number(value)
        return data

    @staticmethod
    def for_fusion(fused: Image, src_a: Image, src_b: Image, *, standard_ssim: bool = False) -> "MetricsReport":
        """Report a fused image against both sources; RMSE and PSNR are averaged."""
        rmse_a, rmse_b = rmse(src_a, fused), rmse(src_b, fused)
        psnr_a, psnr_b = psnr_from_rmse(rmse_a), psnr_from_rmse(rmse_b)
        return MetricsReport(
            entropy=entropy(fused),
            psnr=0.5 * (psnr_a + psnr_b),
            rmse=0.5 * (rmse_a + rmse_b),
            ssim_vs_a=ssim_global(src_a, fused),
            ssim_vs_b=ssim_global(src_b, fused),
            sd=sd(fused),
            mean=mean(fused),
            rmse_vs_a=rmse_a,
            rmse_vs_b=rmse_b,
            psnr_vs_a=psnr_a,
            psnr_vs_b=psnr_b,
            ssim_standard_vs_a=ssim_standard(src_a, fused) if standard_ssim else None,
            ssim_standard_vs_b=ssim_standard(src_b, fused) if standard_ssim else None,
        )

    @staticmethod
    def for_pair(reference: Image, test: Image, *, standard_ssim: bool = False) -> "MetricsReport":
        """Report ``test`` against a single reference; the ``_vs_b`` fields stay empty."""
        value = rmse(reference, test)
        return MetricsReport(
            entropy=entropy(test),
            psnr=psnr_from_rmse(value),
            rmse=value,
            ssim_vs_a=ssim_global(reference, test),
            ssim_vs_b=None,
            sd=sd(test),
            mean=mean(test),
            rmse_vs_a=value,
            rmse_vs_b=None,
            psnr_vs_a=psnr_from_rmse(value),
            psnr_vs_b=None,
            ssim_standard_vs_a=ssim_standard(reference, test) if standard_ssim else None,
        )

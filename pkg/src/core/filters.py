"""
Filter tables for the dual-tree transform.

Level 1 uses the Antonini (9,7) biorthogonal pair, applied undecimated with
zero phase. Tree b is tree a delayed by one sample, so each tree is one
polyphase component of the undecimated output.

Levels >= 2 use Kingsbury's 14-tap Q-shift orthonormal filter. Tree a runs
the time-reversed lowpass and tree b the original, giving the quarter-sample
delay difference between the trees. The published taps only place their
zero at z = -1 to about 1e-6, so the bank refines them once onto an exactly
orthonormal filter with that zero before use.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Antonini 9/7, normalised to unit DC gain on the lowpass.
ANTONINI_LO = np.array([
    0.0267487574108101, -0.0168641184428747, -0.0782232665289905,
    0.2668641184428729, 0.6029490182363593, 0.2668641184428769,
    -0.0782232665289884, -0.0168641184428753, 0.0267487574108096,
])
ANTONINI_HI = np.array([
    0.0456358815571251, -0.0287717631142493, -0.2956358815571280,
    0.5575435262285023, -0.2956358815571233, -0.0287717631142531,
    0.0456358815571261,
])

# Q-shift (14,14) lowpass, tree b orientation, as published.
QSHIFT_14 = np.array([
    0.0032531427636532, -0.0038832119991585, 0.0346603468448535,
    -0.0388728012688278, -0.1172038876991153, 0.2752953846688820,
    0.7561456438925225, 0.5688104207121227, 0.0118660920337970,
    -0.1067118046866654, 0.0238253847949203, 0.0170252238815540,
    -0.0054394759372741, -0.0045568956284755,
])

_REFINE_STEPS = 6
_REFINE_TOLERANCE = 1e-16


def _alternate_signs(taps: np.ndarray, start: int) -> np.ndarray:
    out = taps.copy()
    out[start::2] *= -1.0
    return out


def _signs(size: int) -> np.ndarray:
    return np.where(np.arange(size) % 2 == 0, 1.0, -1.0)


def _qshift_residual(h: np.ndarray) -> np.ndarray:
    # Autocorrelation at every even lag against an impulse, then H(-1).
    residual = [float(np.dot(h[: h.size - lag], h[lag:])) for lag in range(0, h.size, 2)]
    residual[0] -= 1.0
    residual.append(float(np.dot(_signs(h.size), h)))
    return np.asarray(residual)


def _qshift_jacobian(h: np.ndarray) -> np.ndarray:
    rows = []
    for lag in range(0, h.size, 2):
        row = np.zeros(h.size)
        row[: h.size - lag] += h[lag:]
        row[lag:] += h[: h.size - lag]
        rows.append(row)
    rows.append(_signs(h.size))
    return np.vstack(rows)


def refine_qshift(taps: np.ndarray) -> np.ndarray:
    """Nearby orthonormal lowpass with an exact zero at z = -1.

    Minimum-norm Newton steps on the orthonormality and zero constraints,
    starting from ``taps``.
    """
    h = np.asarray(taps, dtype=np.float64).copy()
    for _ in range(_REFINE_STEPS):
        residual = _qshift_residual(h)
        if np.max(np.abs(residual)) <= _REFINE_TOLERANCE:
            break
        step, *_ = np.linalg.lstsq(_qshift_jacobian(h), -residual, rcond=None)
        h += step
    logger.debug("Q-shift taps moved by %.3g during refinement", float(np.max(np.abs(h - taps))))
    return h


@dataclass(frozen=True)
class FilterPair:
    lo: np.ndarray
    hi: np.ndarray


@dataclass(frozen=True)
class FilterBank:
    level1_analysis: FilterPair
    level1_synthesis: FilterPair
    qshift_analysis_a: FilterPair
    qshift_analysis_b: FilterPair

    @property
    def qshift_synthesis_a(self) -> FilterPair:
        # Orthonormal bank: synthesis is the time reverse of analysis.
        return FilterPair(self.qshift_analysis_a.lo[::-1].copy(), self.qshift_analysis_a.hi[::-1].copy())

    @property
    def qshift_synthesis_b(self) -> FilterPair:
        return FilterPair(self.qshift_analysis_b.lo[::-1].copy(), self.qshift_analysis_b.hi[::-1].copy())

    def verify(self) -> Dict[str, float]:
        """Reconstruction error of every pair and the DC leak of every analysis highpass.

        ``*_dc`` entries are ``|sum(hi)|``; a non-zero value lets constant
        images into the highpass subbands.
        """
        errors = {
            "level1": _undecimated_pr_error(self.level1_analysis, self.level1_synthesis),
            "qshift_a": _orthonormal_pr_error(self.qshift_analysis_a),
            "qshift_b": _orthonormal_pr_error(self.qshift_analysis_b),
            "level1_dc": abs(float(self.level1_analysis.hi.sum())),
            "qshift_a_dc": abs(float(self.qshift_analysis_a.hi.sum())),
            "qshift_b_dc": abs(float(self.qshift_analysis_b.hi.sum())),
        }
        logger.debug("Filter bank errors: %s", errors)
        return errors


def _undecimated_pr_error(analysis: FilterPair, synthesis: FilterPair) -> float:
    # Zero-phase odd filters: products share their centre, so compare to a centred impulse.
    response = np.convolve(analysis.lo, synthesis.lo) + np.convolve(analysis.hi, synthesis.hi)
    target = np.zeros_like(response)
    target[response.size // 2] = 1.0
    return float(np.linalg.norm(response - target))


def _orthonormal_pr_error(pair: FilterPair) -> float:
    lo, hi = pair.lo, pair.hi
    centre = lo.size - 1
    even_lags = slice(centre % 2, None, 2)
    auto_lo = np.correlate(lo, lo, mode="full")[even_lags]
    auto_hi = np.correlate(hi, hi, mode="full")[even_lags]
    cross = np.correlate(lo, hi, mode="full")[even_lags]
    impulse = np.zeros_like(auto_lo)
    impulse[centre // 2] = 1.0
    return float(max(
        np.linalg.norm(auto_lo - impulse),
        np.linalg.norm(auto_hi - impulse),
        np.linalg.norm(cross),
    ))


@lru_cache(maxsize=None)
def default_filter_bank() -> FilterBank:
    level1 = FilterPair(ANTONINI_LO.copy(), ANTONINI_HI.copy())
    synthesis = FilterPair(
        _alternate_signs(ANTONINI_HI, 0),
        _alternate_signs(ANTONINI_LO, 1),
    )
    qshift = refine_qshift(QSHIFT_14)
    lo_a = qshift[::-1].copy()
    hi_a = _alternate_signs(qshift, 0)
    bank = FilterBank(
        level1_analysis=level1,
        level1_synthesis=synthesis,
        qshift_analysis_a=FilterPair(lo_a, hi_a),
        qshift_analysis_b=FilterPair(lo_a[::-1].copy(), hi_a[::-1].copy()),
    )
    for pair in (bank.level1_analysis, bank.level1_synthesis, bank.qshift_analysis_a, bank.qshift_analysis_b):
        pair.lo.setflags(write=False)
        pair.hi.setflags(write=False)
    return bank


def level1_taps(bank: FilterBank) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    return (
        bank.level1_analysis.lo,
        bank.level1_analysis.hi,
        bank.level1_synthesis.lo,
        bank.level1_synthesis.hi,
    )

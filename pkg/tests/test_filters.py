import numpy as np
import pytest

from src.core.filters import (
    ANTONINI_HI,
    ANTONINI_LO,
    QSHIFT_14,
    default_filter_bank,
    level1_taps,
    refine_qshift,
)


def test_every_pair_reconstructs_perfectly():
    errors = default_filter_bank().verify()
    for name in ("level1", "qshift_a", "qshift_b"):
        assert errors[name] < 1e-10


def test_every_highpass_rejects_dc():
    errors = default_filter_bank().verify()
    for name in ("level1_dc", "qshift_a_dc", "qshift_b_dc"):
        assert errors[name] < 1e-12


def test_filter_lengths():
    bank = default_filter_bank()
    assert bank.level1_analysis.lo.size % 2 == 1
    assert bank.level1_analysis.hi.size % 2 == 1
    assert bank.qshift_analysis_a.lo.size == 14


def test_dc_gains():
    assert ANTONINI_LO.sum() == pytest.approx(1.0, abs=1e-12)
    assert ANTONINI_HI.sum() == pytest.approx(0.0, abs=1e-12)
    assert QSHIFT_14.sum() == pytest.approx(np.sqrt(2.0), abs=1e-10)
    bank = default_filter_bank()
    assert bank.qshift_analysis_a.lo.sum() == pytest.approx(np.sqrt(2.0), abs=1e-14)
    assert abs(bank.qshift_analysis_a.hi.sum()) < 1e-14


def test_refinement_stays_close_to_published_taps():
    refined = refine_qshift(QSHIFT_14)
    assert np.max(np.abs(refined - QSHIFT_14)) < 1e-5
    signs = np.where(np.arange(refined.size) % 2 == 0, 1.0, -1.0)
    assert abs(np.dot(signs, refined)) < 1e-14
    assert abs(np.dot(signs, QSHIFT_14)) > 1e-8


def test_qshift_trees_are_time_reversed():
    bank = default_filter_bank()
    np.testing.assert_array_equal(bank.qshift_analysis_b.lo, bank.qshift_analysis_a.lo[::-1])
    np.testing.assert_array_equal(bank.qshift_analysis_b.hi, bank.qshift_analysis_a.hi[::-1])
    np.testing.assert_array_equal(bank.qshift_synthesis_a.lo, bank.qshift_analysis_a.lo[::-1])


def test_bank_is_cached_and_frozen():
    bank = default_filter_bank()
    assert default_filter_bank() is bank
    h0, _, _, _ = level1_taps(bank)
    with pytest.raises(ValueError):
        h0[0] = 1.0

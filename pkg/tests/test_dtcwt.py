import cv2
import numpy as np
import pytest

from src.core.dtcwt import (
    ORIENTATIONS,
    Orientation,
    Pyramid,
    Subband,
    TransformError,
    forward,
    inverse,
    shift_sensitivity,
)
from src.core.image_model import Extent, Image, pad_to_multiple


def _relative_error(expected: np.ndarray, actual: np.ndarray) -> float:
    return float(np.linalg.norm(expected - actual) / np.linalg.norm(expected))


def _random_cases(count: int):
    rng = np.random.default_rng(2024)
    for _ in range(count):
        levels = int(rng.integers(1, 4))
        height, width = (int(v) for v in rng.integers(32, 257, size=2))
        yield levels, rng.integers(0, 256, (height, width)).astype(float)


@pytest.mark.parametrize("levels,pixels", list(_random_cases(50)))
def test_perfect_reconstruction_random_sizes(levels, pixels):
    padded, extent = pad_to_multiple(Image(pixels), 1 << levels)
    restored = inverse(forward(padded, levels, source_extent=extent))
    assert restored.extent == extent
    assert _relative_error(pixels, restored.pixels) < 1e-8


@pytest.mark.parametrize("levels", [1, 2, 3, 4])
def test_perfect_reconstruction_square(levels):
    pixels = np.random.default_rng(levels).random((64, 64)) * 255.0
    restored = inverse(forward(Image(pixels), levels))
    assert _relative_error(pixels, restored.pixels) < 1e-8


@pytest.mark.parametrize("size,levels", [(64, 3), (128, 5), (32, 2)])
def test_constant_image_has_no_highpass(size, levels):
    pyr = forward(Image(np.full((size, size), 128.0)), levels)
    for band in pyr.highpass:
        assert band.magnitude.max() < 1e-10


def test_wide_strip_reconstructs():
    pixels = np.random.default_rng(3).random((16, 4096)) * 255.0
    pyr = forward(Image(pixels), 3)
    assert pyr.lowpass.shape == (4, 1024)
    assert _relative_error(pixels, inverse(pyr).pixels) < 1e-8


def test_subband_shapes_and_order():
    pyr = forward(Image(np.random.default_rng(0).random((64, 64))), 2)
    assert len(pyr.highpass) == 12
    assert pyr.lowpass.shape == (32, 32)
    assert pyr.padded_extent == Extent(64, 64)
    for level, size in ((1, 32), (2, 16)):
        bands = pyr.level_subbands(level)
        assert tuple(band.orientation for band in bands) == ORIENTATIONS
        assert all(band.shape == (size, size) for band in bands)
    assert pyr.subband(2, -45) is pyr.highpass[10]


@pytest.mark.parametrize("position", [(32, 32), (20, 41)])
def test_impulse_mirror_orientations_have_equal_energy(position):
    pixels = np.zeros((64, 64))
    pixels[position] = 255.0
    pyr = forward(Image(pixels), 3)
    for level in range(1, 4):
        for theta in (15, 45, 75):
            plus = pyr.subband(level, theta).energy()
            minus = pyr.subband(level, -theta).energy()
            assert plus == pytest.approx(minus, rel=1e-9)


def test_transform_is_linear():
    rng = np.random.default_rng(5)
    x, y = rng.random((32, 32)), rng.random((32, 32))
    px = forward(Image(x, depth=None), 2)
    py = forward(Image(y, depth=None), 2)
    pxy = forward(Image(2.0 * x - y, depth=None), 2)
    np.testing.assert_allclose(pxy.lowpass, 2.0 * px.lowpass - py.lowpass, atol=1e-10)
    for combined, first, second in zip(pxy.highpass, px.highpass, py.highpass):
        np.testing.assert_allclose(combined.coefficients, 2.0 * first.coefficients - second.coefficients, atol=1e-10)


def test_pyramid_energy_stays_near_image_energy():
    pixels = np.random.default_rng(9).random((64, 64)) * 255.0
    ratio = forward(Image(pixels), 3).energy() / float(np.sum(pixels ** 2))
    assert 0.5 <= ratio <= 2.0


def _zero_pyramid(size: int, levels: int) -> Pyramid:
    bands = [
        Subband(level, theta, np.zeros((size >> level, size >> level)), np.zeros((size >> level, size >> level)))
        for level in range(1, levels + 1)
        for theta in ORIENTATIONS
    ]
    lowpass = np.zeros((size >> (levels - 1), size >> (levels - 1)))
    return Pyramid(levels, lowpass, tuple(bands), Extent(size, size))


def test_zero_pyramid_inverts_to_zero_image():
    out = inverse(_zero_pyramid(32, 3))
    assert out.extent == Extent(32, 32)
    assert np.all(out.pixels == 0.0)


def test_malformed_pyramids_rejected():
    good = _zero_pyramid(32, 2)
    with pytest.raises(TransformError):
        Pyramid(2, good.lowpass, good.highpass[:-1], good.source_extent)
    swapped = list(good.highpass)
    swapped[0], swapped[1] = swapped[1], swapped[0]
    with pytest.raises(TransformError):
        Pyramid(2, good.lowpass, tuple(swapped), good.source_extent)
    wrong = list(good.highpass)
    wrong[7] = Subband(2, Orientation.P45, np.zeros((4, 4)), np.zeros((4, 4)))
    with pytest.raises(TransformError):
        Pyramid(2, good.lowpass, tuple(wrong), good.source_extent)
    with pytest.raises(TransformError):
        Pyramid(2, good.lowpass, good.highpass, Extent(40, 32))
    with pytest.raises(TransformError):
        Subband(1, Orientation.P15, np.zeros((2, 2)), np.zeros((2, 3)))


@pytest.mark.parametrize("levels", [0, 7, 2.0, True])
def test_forward_rejects_bad_levels(levels):
    with pytest.raises(TransformError):
        forward(Image(np.zeros((64, 64))), levels)


def test_forward_rejects_non_divisible_size():
    with pytest.raises(TransformError, match="pad"):
        forward(Image(np.zeros((36, 64))), 3)


def test_subband_accessors():
    band = Subband(1, 15, np.array([[3.0, 0.0]]), np.array([[4.0, -1.0]]))
    assert band.orientation is Orientation.P15
    np.testing.assert_allclose(band.magnitude, [[5.0, 1.0]])
    np.testing.assert_allclose(band.phase, [[np.arctan2(4.0, 3.0), -np.pi / 2]])
    assert band.energy() == pytest.approx(26.0)
    assert band.coefficients[0, 0] == 3.0 + 4.0j


def test_shift_sensitivity_of_constant_image_is_zero():
    scores = shift_sensitivity(Image(np.full((64, 64), 77.0)), 3)
    np.testing.assert_array_equal(scores, np.zeros(3))


def test_full_stride_shift_of_periodic_pattern_is_zero():
    y, x = np.mgrid[0:64, 0:64]
    pattern = 128.0 + 60.0 * np.sin(2 * np.pi * x / 8.0) * np.cos(2 * np.pi * y / 8.0)
    scores = shift_sensitivity(Image(pattern), 3, shifts=(0, 8))
    assert np.all(scores < 1e-9)


def test_dual_tree_is_less_shift_sensitive_than_single_tree():
    noise = np.random.default_rng(11).random((64, 64)) * 255.0
    smooth = cv2.GaussianBlur(noise, (0, 0), 1.5, borderType=cv2.BORDER_REFLECT)
    img = Image(smooth, depth=None)
    dual = shift_sensitivity(img, 2)
    single = shift_sensitivity(img, 2, single_tree=True)
    assert np.all(dual < single)

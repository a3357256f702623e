import numpy as np
import pytest

from src.core.image_model import Extent, Image, crop_to_extent, pad_to_multiple


def test_image_is_read_only_float_copy():
    source = np.arange(16, dtype=np.uint8).reshape(4, 4)
    img = Image(source)
    assert img.pixels.dtype == np.float64
    assert img.width == 4 and img.height == 4
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 1.0
    source[0, 0] = 99
    assert img.pixels[0, 0] == 0.0


@pytest.mark.parametrize(
    "pixels",
    [
        np.zeros(4),
        np.zeros((1, 5)),
        np.zeros((5, 1)),
        np.array([[0.0, np.nan], [1.0, 2.0]]),
        np.array([[0.0, 256.0], [1.0, 2.0]]),
        np.array([[-1.0, 0.0], [1.0, 2.0]]),
    ],
)
def test_image_rejects_invalid_rasters(pixels):
    with pytest.raises(ValueError):
        Image(pixels)


def test_unbounded_depth_allows_signed_values():
    img = Image(np.array([[-2.0, 2.0], [300.0, 0.0]]), depth=None)
    assert img.depth is None
    assert img.pixels.min() == -2.0


def test_equality_compares_pixels_and_depth():
    a = Image(np.eye(3) * 10)
    assert a == Image(np.eye(3) * 10)
    assert a != Image(np.eye(3) * 11)
    assert a != Image(np.eye(3) * 10, depth=None)


def test_is_constant():
    assert Image(np.full((3, 3), 128.0)).is_constant()
    assert not Image(np.eye(3)).is_constant()


def test_extent_as_tuple():
    extent = Extent(5, 8)
    assert extent.as_tuple() == (5, 8)


def test_pad_mirrors_without_repeating_edge():
    pixels = np.arange(36, dtype=float).reshape(6, 6)
    padded, extent = pad_to_multiple(Image(pixels), 4)
    assert padded.pixels.shape == (8, 8)
    assert extent == Extent(6, 6)
    np.testing.assert_array_equal(padded.pixels[6, :6], pixels[4])
    np.testing.assert_array_equal(padded.pixels[7, :6], pixels[3])
    np.testing.assert_array_equal(padded.pixels[:6, 6], pixels[:, 4])
    np.testing.assert_array_equal(padded.pixels[:6, :6], pixels)


def test_pad_is_identity_when_already_divisible():
    img = Image(np.random.default_rng(0).integers(0, 256, (8, 8)))
    padded, extent = pad_to_multiple(img, 8)
    assert padded is img
    assert extent == Extent(8, 8)


def test_pad_only_the_short_dimension():
    padded, extent = pad_to_multiple(Image(np.ones((5, 8))), 2)
    assert padded.pixels.shape == (6, 8)
    assert extent == Extent(5, 8)


def test_pad_wider_than_image_keeps_reflecting():
    padded, _ = pad_to_multiple(Image(np.array([[1.0, 2.0], [3.0, 4.0]])), 8)
    assert padded.pixels.shape == (8, 8)
    assert set(np.unique(padded.pixels)) <= {1.0, 2.0, 3.0, 4.0}


def test_pad_rejects_non_positive_factor():
    with pytest.raises(ValueError):
        pad_to_multiple(Image(np.ones((4, 4))), 0)


def test_crop_restores_original():
    img = Image(np.random.default_rng(1).integers(0, 256, (5, 7)))
    padded, extent = pad_to_multiple(img, 4)
    assert crop_to_extent(padded, extent) == img


def test_crop_rejects_larger_extent():
    with pytest.raises(ValueError):
        crop_to_extent(Image(np.ones((4, 4))), Extent(5, 4))

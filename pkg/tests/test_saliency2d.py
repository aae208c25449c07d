import numpy as np
import pytest
from PIL import Image
from scipy import ndimage

from omnisal.errors import DomainError, MapNotFoundError
from omnisal.saliency2d import (BmsBackend, BmsParams, ExternalBackend, LuminanceBackend, bms,
                                bms_channels, external_backend, lab_channels, luminance_backend,
                                make_backend)


def square_image(offset=(24, 24), size=16, n=64):
    img = np.zeros((n, n, 3), np.uint8)
    r, c = offset
    img[r:r + size, c:c + size] = 255
    return img


def test_uniform_gray_is_zero():
    out = bms(np.full((32, 48, 3), 128, np.uint8))
    assert out.shape == (32, 48)
    assert not out.any()


def test_centered_square_concentrates_mass():
    p = BmsParams()
    img = square_image()
    s = bms(img, p)
    inside = np.zeros((64, 64), bool)
    inside[24:40, 24:40] = True
    grow = int(np.ceil(p.dilation + 2 * p.blur_sigma(s.shape)))
    region = ndimage.binary_dilation(inside, iterations=grow)
    assert s[region].sum() >= 0.8 * s.sum()
    assert s.max() == 1.0


def test_border_square_suppressed():
    centred = bms(square_image()).sum()
    touching = bms(square_image(offset=(0, 24))).sum()
    assert touching <= 0.2 * centred


def test_mirror_equivariance_exact(rng):
    img = (ndimage.gaussian_filter(rng.random((40, 56, 3)), (3, 3, 0)) * 255).astype(np.uint8)
    s = bms(img)
    np.testing.assert_array_equal(bms(img[:, ::-1]), s[:, ::-1])
    np.testing.assert_array_equal(bms(img[::-1]), s[::-1])


def test_channel_shift_invariance(rng):
    # integer-valued channels keep the stretch arithmetic exact
    ch = rng.integers(0, 200, (32, 32, 2)).astype(float)
    ch = ndimage.median_filter(ch, size=(5, 5, 1))
    base = bms_channels(ch)
    for shift in (1.0, 3.0):
        np.testing.assert_array_equal(bms_channels(ch + shift), base)


def test_output_contract_and_determinism(rng):
    img = rng.integers(0, 256, (30, 50, 3), dtype=np.uint8)
    a = bms(img)
    assert a.shape == (30, 50) and a.min() >= 0 and a.max() <= 1
    np.testing.assert_array_equal(a, bms(img))
    b = BmsBackend(BmsParams(delta=16))(img, branch="cmp", orientation="x")
    assert b.shape == (30, 50)


def test_params_validation():
    with pytest.raises(DomainError):
        BmsParams(delta=0.5)
    with pytest.raises(DomainError):
        BmsParams(opening=-1)
    assert BmsParams().blur_sigma((100, 200)) == pytest.approx(6.0)


def test_lab_drops_flat_channels():
    # black/white image: chroma is numerically flat and must not be stretched
    assert lab_channels(square_image()).shape == (64, 64, 1)


def test_luminance_examples():
    np.testing.assert_array_equal(luminance_backend(np.full((2, 4, 3), 255, np.uint8)), 1.0)
    red = np.zeros((1, 1, 3), np.uint8)
    red[..., 0] = 255
    assert luminance_backend(red)[0, 0] == pytest.approx(0.2126)


def test_luminance_shift_equivariant(rng):
    from omnisal.projection import yaw_shift

    img = rng.integers(0, 256, (16, 32, 3), dtype=np.uint8)
    np.testing.assert_array_equal(luminance_backend(yaw_shift(img, 45)),
                                  yaw_shift(luminance_backend(img), 45))


def test_external_npy(tmp_path):
    np.save(tmp_path / "p33__erp__yaw000.npy", np.full((4, 8), 0.5))
    be = external_backend(str(tmp_path / "p33__{branch}__{orientation}.npy"))
    np.testing.assert_array_equal(be(np.zeros((4, 8, 3)), branch="erp", orientation="yaw000"), 0.5)


def test_external_16bit_png(tmp_path):
    m = np.zeros((4, 8), np.uint16)
    m[1, 2] = 65535
    Image.fromarray(m).save(tmp_path / "a__cmp__front.png")
    be = ExternalBackend(tmp_path / "a__{branch}__{orientation}.png")
    out = be(np.zeros((4, 8, 3)), branch="cmp", orientation="front")
    assert out.max() == 1.0 and out.sum() == 1.0


def test_external_missing_and_mismatch(tmp_path):
    be = ExternalBackend(tmp_path / "a__{branch}__{orientation}.npy")
    with pytest.raises(MapNotFoundError, match="erp__top"):
        be(np.zeros((4, 4, 3)), branch="erp", orientation="top")
    np.save(tmp_path / "a__erp__top.npy", np.zeros((3, 3)))
    with pytest.raises(DomainError):
        be(np.zeros((4, 4, 3)), branch="erp", orientation="top")


def test_make_backend():
    assert isinstance(make_backend("luminance"), LuminanceBackend)
    assert isinstance(make_backend("bms"), BmsBackend)
    with pytest.raises(DomainError):
        make_backend("salgan")

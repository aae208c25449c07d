import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omnisal import projection as proj
from omnisal.errors import DomainError
from omnisal.sphere_geom import Rotation3, erp_pixel_to_direction, row_latitudes

ROT = [Rotation3(), Rotation3(45, 0, 0), Rotation3(0, 45, 0), Rotation3(0, 0, 45),
       Rotation3(45, 45, 0), Rotation3(12, 34, 56)]


def latitude_map(H):
    return np.repeat(np.deg2rad(row_latitudes(H))[:, None], 2 * H, axis=1)


@pytest.mark.parametrize("face", proj.FACES)
@pytest.mark.parametrize("r", ROT[:3])
def test_extract_constant(face, r):
    src = np.full((16, 32, 3), 0.375)
    out = proj.extract_face(src, face, r, 8)
    assert out.shape == (8, 8, 3)
    np.testing.assert_allclose(out, 0.375, atol=1e-15)


def test_front_centre_samples_image_centre():
    H, W = 8, 16
    src = np.zeros((H, W))
    # the four pixels around lon=0, lat=0
    src[3:5, 7:9] = 1.0
    out = proj.extract_face(src, "front", proj.IDENTITY, 3)
    assert out[1, 1] == pytest.approx(1.0)
    d = proj.face_directions("front", 3)[1, 1]
    np.testing.assert_allclose(d, [1, 0, 0], atol=1e-15)


def test_top_face_latitude_bound():
    H = 512
    src = np.sin(latitude_map(H))
    top = proj.extract_face(src, "top", proj.IDENTITY, 256)
    assert top.min() >= np.sin(np.deg2rad(35.26)) - 0.01
    # analytic latitude of each ray agrees with the sampled value
    d = proj.face_directions("top", 256)
    np.testing.assert_allclose(top, d[..., 2], atol=0.01)


def test_extract_rotation_moves_content():
    # front face after a 90 degree Z rotation looks where the right face looked
    H = 64
    src = np.random.default_rng(0).random((H, 2 * H))
    a = proj.extract_face(src, "front", Rotation3(0, 0, 90), 16)
    b = proj.extract_face(src, "right", proj.IDENTITY, 16)
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_face_too_small():
    with pytest.raises(DomainError):
        proj.extract_face(np.zeros((8, 16)), "front", proj.IDENTITY, 1)
    with pytest.raises(DomainError):
        proj.extract_face(np.zeros((8, 16)), "side", proj.IDENTITY, 4)


@pytest.mark.parametrize("r", ROT)
def test_coverage_partition(r):
    H, W = 64, 128
    total = np.zeros((H, W), int)
    for face in proj.FACES:
        _, cov = proj.project_face_to_erp(np.ones((8, 8)), face, r, W, H)
        total += cov
    np.testing.assert_array_equal(total, 1)


def test_coverage_matches_geometry():
    H, W = 128, 256
    _, cov = proj.project_face_to_erp(np.ones((16, 16)), "top", proj.IDENTITY, W, H)
    lat = row_latitudes(H)
    assert cov[lat > 45].all()
    dlat = 180.0 / H
    assert not cov[lat < 35.26 - dlat].any()
    # brute-force face test: top owns a direction iff z is the largest |component| and positive
    vv, uu = np.mgrid[0:H, 0:W]
    d = erp_pixel_to_direction(uu, vv, W, H)
    owner = (d[..., 2] > np.abs(d[..., 0])) & (d[..., 2] > np.abs(d[..., 1]))
    np.testing.assert_array_equal(cov, owner)


def test_project_constant_face():
    out, cov = proj.project_face_to_erp(np.full((8, 8), 0.25), "left", Rotation3(0, 45, 0), 64, 32)
    np.testing.assert_allclose(out[cov], 0.25)
    assert np.all(out[~cov] == 0)


def test_project_rejects_bad_shapes():
    with pytest.raises(DomainError):
        proj.project_face_to_erp(np.ones((8, 8)), "top", proj.IDENTITY, 30, 20)
    with pytest.raises(DomainError):
        proj.project_face_to_erp(np.ones((8, 6)), "top", proj.IDENTITY, 32, 16)


@pytest.mark.parametrize("r", [Rotation3(), Rotation3(45, 45, 0)])
def test_face_round_trip_blurred(blurred_noise, r):
    H = 256
    x = blurred_noise(H, sigma=2.0)
    back = proj.faces_to_erp(proj.extract_faces(x, r, H // 2), r, 2 * H, H)
    assert np.abs(back - x).mean() <= 0.01


def test_resampling_stays_in_range(blurred_noise):
    x = blurred_noise(64)
    for face, f in proj.extract_faces(x, Rotation3(45, 0, 0), 32).items():
        assert f.min() >= x.min() - 1e-12 and f.max() <= x.max() + 1e-12
    back = proj.faces_to_erp(proj.extract_faces(x, F=32), W=128, H=64)
    assert back.min() >= x.min() - 1e-12 and back.max() <= x.max() + 1e-12


def test_yaw_shift_basic(rng):
    x = rng.random((8, 16))
    np.testing.assert_array_equal(proj.yaw_shift(x, 0), x)
    np.testing.assert_array_equal(proj.yaw_shift(proj.yaw_shift(x, 45), -45), x)
    y = x
    for _ in range(8):
        y = proj.yaw_shift(y, 45)
    np.testing.assert_array_equal(y, x)
    # content moves right by two columns for 45 degrees at W = 16
    np.testing.assert_array_equal(proj.yaw_shift(x, 45)[:, 2], x[:, 0])


def test_yaw_shift_preserves_dtype_and_sum(rng):
    img = rng.integers(0, 256, (8, 16, 3), dtype=np.uint8)
    out = proj.yaw_shift(img, 90)
    assert out.dtype == np.uint8
    assert out.sum() == img.sum()


def test_yaw_shift_fractional(rng):
    x = rng.random((4, 16))
    half = proj.yaw_shift(x, 360.0 / 32)  # half a column
    np.testing.assert_allclose(half[:, 1], 0.5 * (x[:, 0] + x[:, 1]))
    np.testing.assert_allclose(half[:, 0], 0.5 * (x[:, -1] + x[:, 0]))


def test_split_rows():
    assert list(proj.middle_rows(512)[[0, -1]]) == [128, 383]
    assert len(proj.middle_rows(512)) == 256
    src = np.random.default_rng(1).random((512, 1024))
    middle, top, bottom = proj.split_erp(src, 64)
    assert middle.shape == (256, 1024) and top.shape == bottom.shape == (64, 64)
    np.testing.assert_array_equal(middle[512 // 4], src[512 // 2])


def test_split_constant_and_odd_height():
    m, t, b = proj.split_erp(np.full((16, 32), 0.5), 8)
    for part in (m, t, b):
        np.testing.assert_allclose(part, 0.5)
    with pytest.raises(DomainError):
        proj.split_erp(np.zeros((15, 30)))


def test_assemble_constant_round_trip():
    m, t, b = proj.split_erp(np.full((32, 64), 0.7), 16)
    np.testing.assert_allclose(proj.assemble_split(m, t, b, 64, 32), 0.7)


def test_assemble_zero_faces():
    H, W = 32, 64
    out = proj.assemble_split(np.ones((16, W)), np.zeros((16, 16)), np.zeros((16, 16)), W, H)
    polar = np.abs(row_latitudes(H)) > 45
    assert np.all(out[polar] == 0) and np.all(out[~polar] == 1)


def test_assemble_gradient_round_trip():
    H = 512
    lat = latitude_map(H)
    lon = np.repeat(np.linspace(-np.pi, np.pi, 2 * H, endpoint=False)[None], H, axis=0)
    g = 0.5 + 0.25 * np.sin(lat) + 0.2 * np.cos(lat) * np.cos(lon)
    m, t, b = proj.split_erp(g, H // 2)
    assert np.abs(proj.assemble_split(m, t, b, 2 * H, H) - g).mean() <= 0.01


def test_assemble_dimension_mismatch():
    with pytest.raises(DomainError):
        proj.assemble_split(np.ones((10, 64)), np.zeros((16, 16)), np.zeros((16, 16)), 64, 32)
    with pytest.raises(DomainError):
        proj.assemble_split(np.ones((16, 64)), np.zeros((16, 16)), np.zeros((8, 8)), 64, 32)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 15), st.integers(2, 6))
def test_integer_yaw_conserves_sum(k, logh):
    H = 2 ** logh
    x = np.random.default_rng(k).random((H, 2 * H))
    deg = k * 360.0 / (2 * H)
    assert proj.yaw_shift(x, deg).sum() == pytest.approx(x.sum(), rel=0, abs=1e-12 * x.size)

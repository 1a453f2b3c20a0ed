import numpy as np
import pytest
from PIL import Image

from oracles import components8
from qiedge.fileio import read_gray, read_image, read_mask, write_gray, write_rgb
from qiedge.imagecore import ImageError
from qiedge.synthetic import (
    boundary,
    disk,
    render,
    square_mask,
    synthetic_suite,
    write_suite,
)


def test_boundary_of_square():
    b = boundary(square_mask(10, 4))
    assert b.sum() == 12
    assert not b[4:6, 4:6].any()


def test_boundary_is_thin_closed_curve():
    _, gt = render(disk(31.3, 30.8, 14.6), 64, 200.0, 50.0)
    assert len(components8(gt)) == 1


def test_render_coverage_bounds():
    img, _ = render(disk(20.5, 20.5, 8.3), 40, 200.0, 50.0)
    assert img.min() == pytest.approx(50.0) and img.max() == pytest.approx(200.0)
    assert ((img > 50) & (img < 200)).any()  # anti-aliased rim


def test_suite_deterministic_and_shaped():
    a, b = synthetic_suite(), synthetic_suite()
    assert [s.name for s in a] == [s.name for s in b]
    for x, y in zip(a, b):
        assert x.image.tobytes() == y.image.tobytes()
        assert np.array_equal(x.gt, y.gt)
        assert x.image.shape == x.gt.shape == (128, 128)
        assert x.gt.any()
        assert 0 <= x.image.min() and x.image.max() <= 255


def test_write_suite_round_trip(tmp_path):
    pairs = write_suite(tmp_path, size=64)
    assert len(pairs) == len(synthetic_suite(64))
    for ip, gp in pairs:
        assert read_image(ip).shape == (64, 64)
        assert read_mask(gp).any()


def test_png_gray_round_trip(tmp_path, rng):
    img = rng.uniform(0, 255, (9, 11))
    write_gray(tmp_path / "a.png", img)
    back = read_image(tmp_path / "a.png")
    np.testing.assert_array_equal(back, np.floor(img + 0.5))


def test_pgm_round_trip(tmp_path):
    img = np.arange(12, dtype=np.float64).reshape(3, 4) * 20
    write_gray(tmp_path / "a.pgm", img)
    assert (tmp_path / "a.pgm").read_bytes().startswith(b"P5")
    np.testing.assert_array_equal(read_image(tmp_path / "a.pgm"), img)


def test_rgb_round_trip_and_gray_conversion(tmp_path, rng):
    rgb = np.floor(rng.uniform(0, 255, (5, 6, 3)))
    write_rgb(tmp_path / "c.png", rgb)
    back = read_image(tmp_path / "c.png")
    np.testing.assert_array_equal(back, rgb)
    g = read_gray(tmp_path / "c.png")
    np.testing.assert_allclose(g, 0.2989 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2])


def test_rgba_alpha_dropped(tmp_path):
    arr = np.zeros((2, 2, 4), dtype=np.uint8)
    arr[..., 0] = 200
    arr[..., 3] = 10
    Image.fromarray(arr, "RGBA").save(tmp_path / "x.png")
    out = read_image(tmp_path / "x.png")
    assert out.shape == (2, 2, 3) and np.all(out[..., 0] == 200)


def test_decode_failure(tmp_path):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not an image")
    with pytest.raises(ImageError):
        read_image(bad)

import numpy as np
import pytest

from oracles import components8, hysteresis_bfs, is_closed_ring
from qiedge.canny import (
    CannyThresholds,
    canny,
    hysteresis,
    non_max_suppression,
    quantize_direction,
)
from qiedge.edgefilters import GaussianSpec, GradientField, gaussian_blur, sobel_gradients
from qiedge.imagecore import ImageError


def field(mag, direction=0.0):
    mag = np.asarray(mag, dtype=np.float64)
    d = np.broadcast_to(np.asarray(direction, dtype=np.float64), mag.shape).copy()
    z = np.zeros_like(mag)
    return GradientField(z, z, mag, d)


@pytest.mark.parametrize(
    "deg,axis",
    [(0, 0), (20, 0), (-20, 0), (180, 0), (-180, 0), (30, 1), (45, 1), (-135, 1),
     (80, 2), (90, 2), (-90, 2), (120, 3), (135, 3), (-45, 3), (170, 0)],
)
def test_quantize_direction(deg, axis):
    assert quantize_direction(np.array([np.deg2rad(deg)]))[0] == axis


def test_nms_zero():
    assert np.all(non_max_suppression(field(np.zeros((5, 5)))) == 0)


def test_nms_profile():
    out = non_max_suppression(field([[1.0, 5.0, 1.0]], 0.0))
    np.testing.assert_array_equal(out, [[0.0, 5.0, 0.0]])


def test_nms_axis_matters():
    # same profile but gradient along y: row neighbours are replicated copies
    out = non_max_suppression(field([[1.0, 5.0, 1.0]], np.pi / 2))
    np.testing.assert_array_equal(out, [[1.0, 5.0, 1.0]])


def test_nms_diagonal():
    mag = np.array([[9.0, 0, 0], [0, 4.0, 0], [0, 0, 1.0]])
    out = non_max_suppression(field(mag, np.pi / 4))
    assert out[1, 1] == 0.0 and out[0, 0] == 9.0
    out = non_max_suppression(field(mag, 3 * np.pi / 4))
    assert out[1, 1] == 4.0


def test_nms_plateau_survives():
    mag = np.full((6, 6), 80.0)
    np.testing.assert_array_equal(non_max_suppression(field(mag, 0.3)), mag)


def test_nms_never_increases(rng):
    for _ in range(30):
        img = rng.uniform(0, 255, (16, 16))
        g = sobel_gradients(img)
        out = non_max_suppression(g)
        assert np.all(out <= g.magnitude)
        assert np.all((out == 0) | (out == g.magnitude))


def test_thresholds_validation():
    with pytest.raises(ImageError):
        CannyThresholds(150, 50)
    with pytest.raises(ImageError):
        CannyThresholds(-1, 50)
    with pytest.raises(ImageError):
        CannyThresholds(50, 50)
    assert CannyThresholds() == CannyThresholds(50.0, 150.0)


def test_hysteresis_all_strong():
    np.testing.assert_array_equal(hysteresis(np.full((4, 4), 200.0)), 255.0)


def test_hysteresis_isolated_weak_dropped():
    vals = np.zeros((5, 5))
    vals[2, 2] = 100.0
    assert np.all(hysteresis(vals, CannyThresholds(50, 150)) == 0)


def test_hysteresis_chain_and_gap():
    row = np.array([[0, 200, 100, 100, 0, 100, 0]], dtype=np.float64)
    out = hysteresis(row, CannyThresholds(50, 150))
    np.testing.assert_array_equal(out, [[0, 255, 255, 255, 0, 0, 0]])
    np.testing.assert_array_equal(out, hysteresis_bfs(row, 50, 150))


def test_hysteresis_boundaries_are_strict():
    vals = np.array([[150.0, 50.0, 150.000001]])
    out = hysteresis(vals, CannyThresholds(50, 150))
    # 150 is weak (not > 150), 50 is discarded (<= 50)
    np.testing.assert_array_equal(out, [[0, 0, 255]])
    vals = np.array([[151.0, 150.0]])
    np.testing.assert_array_equal(hysteresis(vals, CannyThresholds(50, 150)), [[255, 255]])


def test_hysteresis_diagonal_connection():
    vals = np.zeros((3, 3))
    vals[0, 0] = 200.0
    vals[1, 1] = 100.0
    vals[2, 2] = 100.0
    np.testing.assert_array_equal(np.diag(hysteresis(vals)), [255, 255, 255])


def test_hysteresis_matches_bfs(rng):
    for _ in range(50):
        vals = rng.uniform(0, 255, (24, 24)) * (rng.uniform(size=(24, 24)) < 0.6)
        np.testing.assert_array_equal(hysteresis(vals), hysteresis_bfs(vals, 50, 150))


def test_hysteresis_monotone(rng):
    for _ in range(50):
        vals = rng.uniform(0, 255, (20, 20))
        base = hysteresis(vals, CannyThresholds(50, 150)) > 0
        lower_high = hysteresis(vals, CannyThresholds(50, 120)) > 0
        higher_low = hysteresis(vals, CannyThresholds(80, 150)) > 0
        assert np.all(lower_high >= base)
        assert np.all(higher_low <= base)


def test_canny_constant():
    assert np.all(canny(np.full((10, 10), 77.0)) == 0)


def test_canny_square_ring(white_square):
    out = canny(white_square)
    assert set(np.unique(out)) <= {0.0, 255.0}
    edges = out > 0
    assert is_closed_ring(edges, inside_point=(32, 32))
    assert not edges[24:40, 24:40].any()
    assert not edges[:8].any() and not edges[-8:].any()


def test_canny_stagewise_matches(white_square):
    blurred = gaussian_blur(white_square, GaussianSpec())
    staged = hysteresis_bfs(non_max_suppression(sobel_gradients(blurred)), 50, 150)
    np.testing.assert_array_equal(canny(white_square), staged)


def test_canny_no_seeds_empty(white_square):
    peak = sobel_gradients(gaussian_blur(white_square, GaussianSpec())).magnitude.max()
    out = canny(white_square, th=CannyThresholds(50, peak + 1))
    assert np.all(out == 0)


def test_canny_binary_on_random(rng):
    out = canny(rng.uniform(0, 255, (32, 32)))
    assert set(np.unique(out)) <= {0.0, 255.0}
    assert len(components8(out > 0)) >= 1

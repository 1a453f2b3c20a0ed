import numpy as np
import pytest

from oracles import laplacian_loops
from qiedge.diffusion import (
    DiffusionConfig,
    Stencil,
    diffuse_step,
    evolve,
    laplacian,
)
from qiedge.imagecore import ImageError


def test_laplacian_constant_is_zero():
    assert np.all(laplacian(np.full((6, 5), 7.0)) == 0)


def test_laplacian_impulse(impulse5):
    out = laplacian(impulse5)
    expected = np.zeros((5, 5))
    expected[2, 2] = -400
    expected[1, 2] = expected[3, 2] = expected[2, 1] = expected[2, 3] = 100
    np.testing.assert_array_equal(out, expected)


def test_laplacian_matches_loops(rng):
    img = rng.uniform(0, 255, (11, 13))
    np.testing.assert_allclose(laplacian(img), laplacian_loops(img), atol=1e-9)


def test_laplacian_sums_to_zero(rng):
    for shape in [(1, 1), (1, 9), (7, 1), (32, 32), (17, 23)]:
        img = rng.uniform(0, 255, shape)
        total = laplacian(img).sum()
        assert abs(total) <= 1e-6 * max(1.0, np.abs(img).sum())


def test_stencils_agree(rng):
    for _ in range(10):
        img = rng.uniform(0, 255, (20, 20))
        a = laplacian(img, Stencil.FOUR_NEIGHBOR)
        b = laplacian(img, Stencil.WEIGHTED)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_step_constant_fixed_point():
    img = np.full((8, 8), 91.0)
    np.testing.assert_array_equal(diffuse_step(img, 0.1), img)


def test_step_impulse(impulse5):
    out = diffuse_step(impulse5, 0.1)
    expected = np.zeros((5, 5))
    expected[2, 2] = 60
    expected[1, 2] = expected[3, 2] = expected[2, 1] = expected[2, 3] = 10
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_step_quarter_delta_stays_in_range(rng):
    for _ in range(20):
        img = rng.uniform(0, 255, (16, 16))
        out = diffuse_step(img, 0.25)
        assert out.min() >= img.min() and out.max() <= img.max()


def test_step_clips_unstable_delta():
    img = np.zeros((5, 5))
    img[2, 2] = 255.0
    out = diffuse_step(img, 1.0)  # centre goes to 255 - 4*255, neighbours to 255
    assert out.min() == 0.0 and out.max() == 255.0


@pytest.mark.parametrize("delta", [0.0, -0.1])
def test_step_rejects_nonpositive_delta(delta):
    with pytest.raises(ImageError):
        diffuse_step(np.zeros((3, 3)), delta)


@pytest.mark.parametrize("kwargs", [dict(delta=0), dict(delta=-1), dict(time_steps=-1), dict(time_steps=1.5)])
def test_config_validation(kwargs):
    with pytest.raises(ImageError):
        DiffusionConfig(**kwargs)


def test_config_defaults():
    cfg = DiffusionConfig()
    assert (cfg.delta, cfg.time_steps, cfg.stencil) == (0.1, 10, Stencil.FOUR_NEIGHBOR)


def test_evolve_zero_steps_identity(rng):
    img = rng.uniform(0, 255, (9, 9))
    np.testing.assert_array_equal(evolve(img, DiffusionConfig(time_steps=0)), img)


def test_evolve_two_steps_is_composition(rng):
    img = rng.uniform(0, 255, (12, 10))
    twice = diffuse_step(diffuse_step(img, 0.1), 0.1)
    np.testing.assert_array_equal(evolve(img, DiffusionConfig(0.1, 2)), twice)


def test_evolve_range_shrinks_every_step(rng):
    psi = rng.uniform(0, 255, (32, 32))
    prev = psi.max() - psi.min()
    for _ in range(50):
        psi = diffuse_step(psi, 0.1)
        span = psi.max() - psi.min()
        assert span <= prev
        prev = span


def test_evolve_deterministic(rng):
    img = rng.uniform(0, 255, (16, 16))
    cfg = DiffusionConfig(0.2, 7, Stencil.WEIGHTED)
    assert evolve(img, cfg).tobytes() == evolve(img.copy(), cfg).tobytes()


def test_evolve_does_not_mutate_input(rng):
    img = rng.uniform(0, 255, (8, 8))
    before = img.copy()
    evolve(img, DiffusionConfig(0.1, 3))
    np.testing.assert_array_equal(img, before)


def test_conservation(rng):
    for delta in (0.05, 0.1, 0.25):
        img = rng.uniform(0, 255, (24, 24))
        out = diffuse_step(img, delta)
        assert abs(out.sum() - img.sum()) <= 1e-6 * img.sum()

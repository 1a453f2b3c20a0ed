"""Gaussian smoothing, Sobel gradients and the Laplacian edge response."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .diffusion import Stencil, laplacian
from .imagecore import ImageError, as_gray, convolve

__all__ = [
    "SOBEL_X",
    "SOBEL_Y",
    "GaussianSpec",
    "GradientField",
    "gaussian_kernel",
    "gaussian_blur",
    "sobel_gradients",
    "sobel_edge_map",
    "laplacian_edge_map",
]

SOBEL_X = np.array(
    [[-1.0, 0.0, 1.0],
     [-2.0, 0.0, 2.0],
     [-1.0, 0.0, 1.0]]
)
SOBEL_Y = np.array(
    [[-1.0, -2.0, -1.0],
     [0.0, 0.0, 0.0],
     [1.0, 2.0, 1.0]]
)


@dataclass(frozen=True)
class GaussianSpec:
    sigma: float = 1.0
    radius: int = 1

    def __post_init__(self):
        if not self.sigma > 0:
            raise ImageError(f"blur sigma must be > 0, got {self.sigma}")
        if int(self.radius) != self.radius or self.radius < 1:
            raise ImageError(f"blur radius must be an integer >= 1, got {self.radius}")


class GradientField(NamedTuple):
    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray
    direction: np.ndarray


def gaussian_kernel(spec: GaussianSpec) -> np.ndarray:
    """Sampled isotropic Gaussian of side ``2k+1``, renormalized to unit sum.

    The continuous ``1/(2 pi sigma^2)`` prefactor cancels in the
    renormalization, so it is never applied.
    """
    k = spec.radius
    offsets = np.arange(-k, k + 1, dtype=np.float64)
    sq = offsets[:, None] ** 2 + offsets[None, :] ** 2
    w = np.exp(-sq / (2.0 * spec.sigma**2))
    return w / w.sum()


def gaussian_blur(img, spec: GaussianSpec | None = None) -> np.ndarray:
    return convolve(img, gaussian_kernel(spec or GaussianSpec()))


def sobel_gradients(img) -> GradientField:
    """Sobel derivatives with magnitude and full-quadrant direction.

    ``direction = atan2(gy, gx)`` in radians; it is 0 wherever both
    derivatives vanish (``numpy.arctan2(0, 0)`` already gives 0, and
    ``-0.0`` is normalized away).
    """
    src = as_gray(img)
    gx = convolve(src, SOBEL_X)
    gy = convolve(src, SOBEL_Y)
    magnitude = np.hypot(gx, gy)
    direction = np.arctan2(gy, gx)
    direction[(gx == 0) & (gy == 0)] = 0.0
    # arctan2 returns -pi for (gy=-0.0, gx<0); fold onto +pi
    direction[direction == -np.pi] = np.pi
    return GradientField(gx, gy, magnitude, direction)


def sobel_edge_map(img) -> np.ndarray:
    """Sobel magnitude rescaled so its maximum becomes 255."""
    mag = sobel_gradients(img).magnitude
    peak = mag.max()
    if peak == 0:
        return np.zeros_like(mag)
    return mag * (255.0 / peak)


def laplacian_edge_map(blurred) -> np.ndarray:
    """Four-neighbour Laplacian with negative (and >255) responses clipped."""
    return np.clip(laplacian(blurred, Stencil.FOUR_NEIGHBOR), 0.0, 255.0)

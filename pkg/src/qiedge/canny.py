"""Canny stages: quantized non-maximum suppression and hysteresis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .edgefilters import GaussianSpec, GradientField, gaussian_blur, sobel_gradients
from .imagecore import ImageError, as_gray

__all__ = [
    "CannyThresholds",
    "AXIS_OFFSETS",
    "quantize_direction",
    "non_max_suppression",
    "hysteresis",
    "canny_stages",
    "canny",
]

# (dx, dy) step along the gradient for the 0, 45, 90 and 135 degree axes.
# y grows downward, so 45 degrees points right-and-down.
AXIS_OFFSETS = ((1, 0), (1, 1), (0, 1), (-1, 1))

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class CannyThresholds:
    t_low: float = 50.0
    t_high: float = 150.0

    def __post_init__(self):
        if not 0 <= self.t_low < self.t_high:
            raise ImageError(
                f"thresholds must satisfy 0 <= t_low < t_high, got ({self.t_low}, {self.t_high})"
            )


def quantize_direction(direction: np.ndarray) -> np.ndarray:
    """Index into AXIS_OFFSETS of the axis nearest to each angle, modulo pi."""
    folded = np.mod(direction, np.pi)
    return (np.rint(folded / (np.pi / 4)).astype(np.int64)) % 4


def non_max_suppression(field: GradientField) -> np.ndarray:
    """Keep a magnitude only where it is >= both neighbours along its axis.

    Ties survive, so flat ridges are kept whole. Borders use replicate
    padding.
    """
    mag = as_gray(field.magnitude)
    h, w = mag.shape
    axis = quantize_direction(np.asarray(field.direction, dtype=np.float64))
    p = np.pad(mag, 1, mode="edge")
    keep = np.zeros(mag.shape, dtype=bool)
    for idx, (dx, dy) in enumerate(AXIS_OFFSETS):
        fwd = p[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        back = p[1 - dy : 1 - dy + h, 1 - dx : 1 - dx + w]
        keep |= (axis == idx) & (mag >= fwd) & (mag >= back)
    return np.where(keep, mag, 0.0)


def hysteresis(nms, th: CannyThresholds | None = None) -> np.ndarray:
    """Double threshold with 8-connected edge tracing; returns a {0, 255} map.

    Strong: value > t_high. Candidate: value > t_low. A candidate survives iff
    its 8-connected candidate component contains a strong pixel.
    """
    th = th or CannyThresholds()
    vals = as_gray(nms)
    candidate = vals > th.t_low
    strong = vals > th.t_high
    labels, n = ndimage.label(candidate, structure=_EIGHT)
    if n == 0:
        return np.zeros_like(vals)
    seeded = np.zeros(n + 1, dtype=bool)
    seeded[labels[strong]] = True
    seeded[0] = False
    return np.where(seeded[labels], 255.0, 0.0)


def canny_stages(blurred, th: CannyThresholds | None = None) -> np.ndarray:
    """Gradient, NMS and hysteresis on an already smoothed image."""
    return hysteresis(non_max_suppression(sobel_gradients(blurred)), th)


def canny(img, blur: GaussianSpec | None = None, th: CannyThresholds | None = None) -> np.ndarray:
    return canny_stages(gaussian_blur(img, blur), th)

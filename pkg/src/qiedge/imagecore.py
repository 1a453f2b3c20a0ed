"""Image value model shared by every stage.

Gray images are 2-D ``float64`` arrays indexed ``img[y, x]`` (row-major,
``y`` down, ``x`` right). RGB images are ``(height, width, 3)`` arrays with
channels in ``[0, 255]``. Kernels are ``(2k+1, 2k+1)`` arrays laid out exactly
as printed, so ``kern[k + dy, k + dx]`` weighs the pixel at offset
``(dx, dy)`` from the output position.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "GRAY_WEIGHTS",
    "ImageError",
    "as_gray",
    "as_rgb",
    "as_kernel",
    "kernel_radius",
    "to_grayscale",
    "clip_intensity",
    "convolve",
    "quantize_u8",
]

GRAY_WEIGHTS = (0.2989, 0.5870, 0.1140)

MAX_SIDE = 1 << 16


class ImageError(ValueError):
    """Malformed image, kernel, or argument."""


def _check_dims(height: int, width: int) -> None:
    if height < 1 or width < 1:
        raise ImageError(f"image dimensions must be positive, got {height}x{width}")
    if height > MAX_SIDE or width > MAX_SIDE:
        raise ImageError(f"image dimensions exceed {MAX_SIDE}: {height}x{width}")


def as_gray(img) -> np.ndarray:
    """Validate ``img`` as a gray image and return it as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ImageError(f"gray image must be 2-D, got shape {arr.shape}")
    _check_dims(*arr.shape)
    return arr


def as_rgb(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ImageError(f"RGB image must have shape (h, w, 3), got {arr.shape}")
    _check_dims(arr.shape[0], arr.shape[1])
    if arr.size and (arr.min() < 0.0 or arr.max() > 255.0):
        raise ImageError("RGB channel values must lie in [0, 255]")
    return arr


def as_kernel(kern) -> np.ndarray:
    arr = np.asarray(kern, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2 != 1:
        raise ImageError(f"kernel must be square with odd side, got shape {arr.shape}")
    return arr


def kernel_radius(kern: np.ndarray) -> int:
    return (kern.shape[0] - 1) // 2


def to_grayscale(img) -> np.ndarray:
    """Luma conversion ``0.2989 R + 0.5870 G + 0.1140 B``.

    The weights sum to 0.9999 and are deliberately not renormalized, so pure
    white maps to 254.9745. Values stay real; nothing is rounded here.
    """
    rgb = as_rgb(img)
    wr, wg, wb = GRAY_WEIGHTS
    return wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]


def clip_intensity(img, lo: float = 0.0, hi: float = 255.0) -> np.ndarray:
    if lo > hi:
        raise ImageError(f"clip bounds inverted: lo={lo} > hi={hi}")
    return np.clip(as_gray(img), lo, hi)


def convolve(img, kern) -> np.ndarray:
    """Correlate ``img`` with ``kern`` under replicate (clamp-to-edge) padding.

    No kernel flip and no output clipping.
    """
    src = as_gray(img)
    w = as_kernel(kern)
    k = kernel_radius(w)
    h, wd = src.shape
    padded = np.pad(src, k, mode="edge")
    out = np.zeros_like(src)
    for j in range(2 * k + 1):
        for i in range(2 * k + 1):
            weight = w[j, i]
            if weight != 0.0:
                out += weight * padded[j : j + h, i : i + wd]
    return out


def quantize_u8(img) -> np.ndarray:
    """Round half-up and clamp to 8-bit, for file output only."""
    arr = np.asarray(img, dtype=np.float64)
    return np.clip(np.floor(arr + 0.5), 0, 255).astype(np.uint8)

"""Seeded additive Gaussian noise.

Samples come from Box-Muller applied to 53-bit uniforms taken from the raw
64-bit output of PCG64 seeded through ``numpy.random.SeedSequence``. Only the
raw bit stream is used (not NumPy's own normal sampler), so a given seed
yields the same field on any NumPy version that ships PCG64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagecore import ImageError, as_gray

__all__ = ["NoiseSpec", "gaussian_samples", "add_gaussian_noise"]

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ImageError(f"noise sigma must be >= 0, got {self.sigma}")


def gaussian_samples(n: int, seed: int) -> np.ndarray:
    """``n`` standard normal draws, reproducible from ``seed``."""
    bitgen = np.random.PCG64(np.random.SeedSequence(int(seed) & _U64))
    pairs = (n + 1) // 2
    raw = bitgen.random_raw(2 * pairs)
    u = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n]


def add_gaussian_noise(img, spec: NoiseSpec) -> np.ndarray:
    src = as_gray(img)
    if spec.sigma == 0:
        return src.copy()
    noise = gaussian_samples(src.size, spec.seed).reshape(src.shape)
    return np.clip(src + spec.sigma * noise, 0.0, 255.0)

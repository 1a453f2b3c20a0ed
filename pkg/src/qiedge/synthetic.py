"""Deterministic synthetic shapes with exact boundary ground truth.

Every scene is a piecewise-constant (or piecewise-linear) image built from a
boolean region mask. The ground-truth boundary is the set of region pixels
that have at least one 4-neighbour outside the region, which is exactly
where a one-pixel-wide step detector should fire.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fileio import write_gray

__all__ = [
    "Scene",
    "disk",
    "rotated_square",
    "half_plane",
    "union",
    "render",
    "square_mask",
    "disk_mask",
    "boundary",
    "square_scene",
    "disk_scene",
    "ramp_scene",
    "synthetic_suite",
    "write_suite",
]


@dataclass(frozen=True)
class Scene:
    name: str
    image: np.ndarray
    gt: np.ndarray


def square_mask(size: int, side: int, top: int | None = None, left: int | None = None) -> np.ndarray:
    top = (size - side) // 2 if top is None else top
    left = (size - side) // 2 if left is None else left
    m = np.zeros((size, size), dtype=bool)
    m[top : top + side, left : left + side] = True
    return m


def disk_mask(size: int, radius: float, cy: float | None = None, cx: float | None = None) -> np.ndarray:
    c = (size - 1) / 2.0
    cy = c if cy is None else cy
    cx = c if cx is None else cx
    yy, xx = np.mgrid[0:size, 0:size]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2


def boundary(mask: np.ndarray) -> np.ndarray:
    """Region pixels with a 4-neighbour outside the region (image border excluded)."""
    p = np.pad(mask, 1, mode="edge")
    inner = p[:-2, 1:-1] & p[2:, 1:-1] & p[1:-1, :-2] & p[1:-1, 2:]
    return mask & ~inner


def _paint(mask: np.ndarray, fg: float, bg: float) -> np.ndarray:
    return np.where(mask, fg, bg).astype(np.float64)


def square_scene(size: int = 128, side: int = 64, fg: float = 255.0, bg: float = 0.0, **kw) -> Scene:
    """Pixel-aligned square; its edges fall exactly between pixel columns."""
    m = square_mask(size, side, **kw)
    return Scene(f"square{side}", _paint(m, fg, bg), boundary(m))


def disk_scene(size: int = 128, radius: float = 36.0, fg: float = 220.0, bg: float = 30.0, **kw) -> Scene:
    m = disk_mask(size, radius, **kw)
    return Scene(f"disk{int(radius)}", _paint(m, fg, bg), boundary(m))


def ramp_scene(size: int = 128, step_at: int | None = None, slope: float = 0.5, jump: float = 120.0) -> Scene:
    """Linear illumination ramp along x with a vertical step of height ``jump``."""
    step_at = size // 2 if step_at is None else step_at
    x = np.arange(size, dtype=np.float64)
    base = 40.0 + slope * x
    row = np.where(x >= step_at, base + jump, base)
    img = np.tile(row, (size, 1))
    m = np.zeros((size, size), dtype=bool)
    m[:, step_at:] = True
    return Scene(f"ramp{step_at}", img, boundary(m))


# Implicit shapes: callables (y, x) -> bool array, continuous coordinates.

def disk(cy: float, cx: float, r: float):
    return lambda y, x: (y - cy) ** 2 + (x - cx) ** 2 <= r * r


def rotated_square(cy: float, cx: float, half: float, angle: float):
    c, s = np.cos(angle), np.sin(angle)
    return lambda y, x: (np.abs(c * (x - cx) + s * (y - cy)) <= half) & (
        np.abs(-s * (x - cx) + c * (y - cy)) <= half
    )


def half_plane(x0: float, y0: float, slope: float):
    """Points right of the line ``x = x0 + slope * (y - y0)``."""
    return lambda y, x: x >= x0 + slope * (y - y0)


def union(*shapes):
    return lambda y, x: np.logical_or.reduce([f(y, x) for f in shapes])


def render(inside, size: int, fg: float, bg, supersample: int = 8):
    """Area-sampled rendering of an implicit shape.

    Each pixel mixes ``fg`` and ``bg`` by the fraction of it the shape
    covers, estimated on a ``supersample`` x ``supersample`` grid. ``bg`` may
    be an array (e.g. an illumination ramp). Ground truth is ``boundary()``
    of the mask of pixel centres inside the shape.
    """
    o = (np.arange(supersample) + 0.5) / supersample - 0.5
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    cov = np.zeros((size, size))
    for dy in o:
        for dx in o:
            cov += inside(yy + dy, xx + dx)
    cov /= supersample * supersample
    img = bg + (fg - bg) * cov
    return np.asarray(img, dtype=np.float64), boundary(inside(yy, xx))


def synthetic_suite(size: int = 128) -> list[Scene]:
    """The fixed scene set used by the acceptance checks and ``qiedge synth``.

    Shapes sit at sub-pixel positions and are area-sampled, so edges are not
    aligned to the pixel grid. Scales are given for ``size=128``.
    """
    u = size / 128.0
    ramp = np.tile(0.4 * np.arange(size, dtype=np.float64) / u, (size, 1)) + 50.0
    scenes = [
        ("disk", render(disk(63.3 * u, 64.6 * u, 36.2 * u), size, 200.0, 70.0)),
        ("tilted-square", render(rotated_square(60.4 * u, 66.7 * u, 28.3 * u, 0.3), size, 190.0, 60.0)),
        ("shapes", render(
            union(
                disk(30.2 * u, 30.7 * u, 12.4 * u),
                disk(90.6 * u, 40.3 * u, 9.1 * u),
                rotated_square(40.5 * u, 95.2 * u, 14.2 * u, 0.7),
                rotated_square(95.3 * u, 95.1 * u, 10.3 * u, 0.1),
            ),
            size, 180.0, 80.0,
        )),
        ("ramp-step", render(half_plane(70.4 * u, 64.0 * u, 0.25), size, ramp + 110.0, ramp)),
    ]
    return [Scene(name, img, gt) for name, (img, gt) in scenes]


def write_suite(out_dir, size: int = 128) -> list[tuple[Path, Path]]:
    """Write ``images/<name>.png`` and ``gt/<name>.png``; return the path pairs."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    pairs = []
    for scene in synthetic_suite(size):
        ip = out / "images" / f"{scene.name}.png"
        gp = out / "gt" / f"{scene.name}.png"
        write_gray(ip, scene.image)
        write_gray(gp, np.where(scene.gt, 255.0, 0.0))
        pairs.append((ip, gp))
    return pairs

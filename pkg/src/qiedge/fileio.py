"""PNG / PGM (P5) decode and encode."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .imagecore import ImageError, as_gray, as_rgb, quantize_u8, to_grayscale

__all__ = ["read_image", "read_gray", "read_mask", "write_gray", "write_rgb"]


def read_image(path) -> np.ndarray:
    """Decode a PNG or PGM file.

    Returns a float64 ``(h, w)`` array for grayscale files and ``(h, w, 3)``
    for colour files. Alpha is dropped; palette images are expanded to RGB.
    """
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("1", "L", "I;16", "I", "F"):
                arr = np.asarray(im.convert("L") if mode == "1" else im, dtype=np.float64)
                if mode in ("I;16", "I") and arr.max(initial=0) > 255:
                    raise ImageError(f"{path}: only 8-bit images are supported")
                return as_gray(arr)
            if mode == "LA":
                return as_gray(np.asarray(im.convert("L"), dtype=np.float64))
            return as_rgb(np.asarray(im.convert("RGB"), dtype=np.float64))
    except (OSError, SyntaxError) as exc:
        raise ImageError(f"cannot decode {path}: {exc}") from exc


def read_gray(path) -> np.ndarray:
    img = read_image(path)
    return img if img.ndim == 2 else to_grayscale(img)


def read_mask(path) -> np.ndarray:
    """Ground-truth edge map: nonzero pixels are edges."""
    img = read_image(path)
    if img.ndim == 3:
        img = img.max(axis=2)
    return img != 0


def write_gray(path, img) -> None:
    path = Path(path)
    fmt = "PPM" if path.suffix.lower() in (".pgm", ".ppm", ".pnm") else "PNG"
    Image.fromarray(quantize_u8(as_gray(img)), mode="L").save(path, format=fmt)


def write_rgb(path, img) -> None:
    Image.fromarray(quantize_u8(as_rgb(img)), mode="RGB").save(Path(path), format="PNG")

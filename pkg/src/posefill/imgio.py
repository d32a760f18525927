"""Image containers and PNG I/O.

All pipeline images are H x W x 3 float32 arrays with values in [-1, 1]
(square, since every stage works on square crops).  On disk they are plain
8-bit PNGs; loading maps [0, 255] -> [-1, 1] via v / 127.5 - 1.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import IoError, ShapeError


def round_half_up(x) -> np.ndarray | int:
    """Round fractional coordinates to pixels, halves away from floor."""
    r = np.floor(np.asarray(x, dtype=np.float64) + 0.5).astype(np.int64)
    return int(r) if np.isscalar(x) else r


def require_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate an H x W x 3 float image in [-1, 1] and return it as float32."""
    a = np.asarray(img)
    if a.ndim != 3 or a.shape[2] != 3:
        raise ShapeError(f"{name}: expected HxWx3 array, got shape {a.shape}")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name}: expected square image, got {a.shape[0]}x{a.shape[1]}")
    a = a.astype(np.float32, copy=False)
    if not np.all(np.isfinite(a)):
        raise ShapeError(f"{name}: contains non-finite values")
    if a.min() < -1.0 - 1e-6 or a.max() > 1.0 + 1e-6:
        raise ShapeError(f"{name}: values outside [-1, 1] (min {a.min()}, max {a.max()})")
    return a


def same_shape(a: np.ndarray, b: np.ndarray, what: str = "images") -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what} have mismatched shapes {a.shape} vs {b.shape}")


def to_unit(img: np.ndarray) -> np.ndarray:
    """Map a [-1, 1] image to [0, 1]."""
    return (np.asarray(img, dtype=np.float64) + 1.0) / 2.0


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Load an 8-bit PNG as a float32 image in [-1, 1]."""
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    except (OSError, ValueError) as exc:
        raise IoError(f"cannot read image {path}: {exc}") from exc
    return arr / 127.5 - 1.0


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write a [-1, 1] image as an 8-bit PNG (round-half-up quantization)."""
    a = np.asarray(img, dtype=np.float64)
    u8 = np.clip(np.floor((a + 1.0) * 127.5 + 0.5), 0, 255).astype(np.uint8)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(u8).save(path, format="PNG")
    except OSError as exc:
        raise IoError(f"cannot write image {path}: {exc}") from exc

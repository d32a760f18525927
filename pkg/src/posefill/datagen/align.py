"""Nose-tip registration: similarity alignment of face crops.

The canonical frame places the nose tip at (0.5*W, 0.6*H).  Alignment is a
uniform scale (out_size / in_size) plus translation; no rotation.
"""

from __future__ import annotations

import numpy as np

from ..errors import AlignmentError
from ..imgio import require_image

LANDMARK_NAMES = ("left_eye", "right_eye", "nose_tip", "mouth_left", "mouth_right")

NOSE_ANCHOR_X = 0.5
NOSE_ANCHOR_Y = 0.6


def check_landmarks(landmarks: dict, image_size: int) -> None:
    """Validate the 5-point landmark dict against image bounds."""
    missing = [n for n in LANDMARK_NAMES if n not in landmarks]
    if missing:
        raise AlignmentError(f"missing landmarks: {missing}")
    nx, ny = landmarks["nose_tip"]
    if not (np.isfinite(nx) and np.isfinite(ny)):
        raise AlignmentError(f"non-finite nose tip ({nx}, {ny})")
    if not (0 <= nx < image_size and 0 <= ny < image_size):
        raise AlignmentError(
            f"nose tip ({nx}, {ny}) outside image bounds {image_size}x{image_size}"
        )


def alignment_params(
    landmarks: dict, in_size: int, out_size: int
) -> tuple[float, float, float]:
    """Return (scale, anchor_x, anchor_y) of the registering transform.

    A source point p maps to (p - nose_tip) * scale + anchor.
    """
    scale = out_size / in_size
    return scale, NOSE_ANCHOR_X * out_size, NOSE_ANCHOR_Y * out_size


def transform_landmarks(landmarks: dict, in_size: int, out_size: int) -> dict:
    """Map landmark coordinates through the alignment transform."""
    s, ax, ay = alignment_params(landmarks, in_size, out_size)
    nx, ny = landmarks["nose_tip"]
    return {
        name: (
            (float(x) - nx) * s + ax,
            (float(y) - ny) * s + ay,
        )
        for name, (x, y) in landmarks.items()
    }


def align_face(image: np.ndarray, landmarks: dict, out_size: int) -> np.ndarray:
    """Register the nose tip to the canonical anchor in an out_size crop.

    Bilinear resampling; pixels mapping outside the source are filled
    with 0.0 (range midpoint).
    """
    img = require_image(image, "align input")
    if out_size < 32:
        raise AlignmentError(f"out_size must be >= 32, got {out_size}")
    in_size = img.shape[0]
    check_landmarks(landmarks, in_size)
    s, ax, ay = alignment_params(landmarks, in_size, out_size)
    nx, ny = landmarks["nose_tip"]

    # Inverse map: output pixel -> source coordinate.
    xs = (np.arange(out_size, dtype=np.float64) - ax) / s + float(nx)
    ys = (np.arange(out_size, dtype=np.float64) - ay) / s + float(ny)
    return _bilinear_sample(img, xs, ys)


def _bilinear_sample(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    gx, gy = np.meshgrid(xs, ys)
    x0 = np.floor(gx)
    y0 = np.floor(gy)
    wx = (gx - x0).astype(np.float32)
    wy = (gy - y0).astype(np.float32)
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)

    def fetch(yi, xi):
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        vals = img[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        return np.where(inside[..., None], vals, 0.0).astype(np.float32)

    v00 = fetch(y0, x0)
    v01 = fetch(y0, x0 + 1)
    v10 = fetch(y0 + 1, x0)
    v11 = fetch(y0 + 1, x0 + 1)
    wx = wx[..., None]
    wy = wy[..., None]
    top = v00 * (1.0 - wx) + v01 * wx
    bot = v10 * (1.0 - wx) + v11 * wx
    return np.clip(top * (1.0 - wy) + bot * wy, -1.0, 1.0)

"""Head pose angles and their constant-channel image encoding."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EncodingError

POSE_CLAMP_DEG = 90.0


@dataclass(frozen=True)
class PoseAngles:
    """Head orientation in degrees."""

    pitch: float
    yaw: float
    roll: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pitch, self.yaw, self.roll)


def normalize_angle(theta: float) -> float:
    """clamp(theta, -90, 90) / 90 -> [-1, 1]."""
    if not math.isfinite(theta):
        raise EncodingError(f"non-finite pose angle {theta}")
    return max(-POSE_CLAMP_DEG, min(POSE_CLAMP_DEG, float(theta))) / POSE_CLAMP_DEG


def render_pose_map(pose: PoseAngles, size: int) -> np.ndarray:
    """Encode a pose as a size x size x 3 constant image.

    Channels (0, 1, 2) carry normalized (pitch, yaw, roll).
    """
    if size < 1:
        raise EncodingError(f"pose map size must be >= 1, got {size}")
    values = [normalize_angle(t) for t in pose.as_tuple()]
    out = np.empty((size, size, 3), dtype=np.float32)
    out[..., 0] = values[0]
    out[..., 1] = values[1]
    out[..., 2] = values[2]
    return out

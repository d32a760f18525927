"""Rectangular occlusion synthesis (the ocular band an HMD would cover)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MaskError
from ..imgio import require_image, round_half_up

HOLE_FILL_VALUE = 0.0


@dataclass(frozen=True)
class MaskSpec:
    """Occlusion rectangle in fractional image coordinates.

    Each edge is independently jittered by +-jitter (uniform) when a mask
    is instantiated, so training sees varying hole extents.
    """

    top: float = 0.25
    bottom: float = 0.6
    left: float = 0.15
    right: float = 0.85
    jitter: float = 0.0

    def validate(self) -> None:
        if not (0.0 <= self.top < self.bottom <= 1.0):
            raise MaskError(f"invalid vertical extent ({self.top}, {self.bottom})")
        if not (0.0 <= self.left < self.right <= 1.0):
            raise MaskError(f"invalid horizontal extent ({self.left}, {self.right})")
        if self.jitter < 0.0:
            raise MaskError(f"jitter must be >= 0, got {self.jitter}")

    def area_fraction(self) -> float:
        return (self.bottom - self.top) * (self.right - self.left)


# Ocular band covering both eyes, with edge jitter for training.
DEFAULT_TRAIN_MASK = MaskSpec(top=0.25, bottom=0.6, left=0.15, right=0.85, jitter=0.05)
# Same band without jitter, for deterministic inference.
DEFAULT_EVAL_MASK = MaskSpec(top=0.25, bottom=0.6, left=0.15, right=0.85, jitter=0.0)


def apply_occlusion(
    image: np.ndarray, spec: MaskSpec, rng_seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Zero out a (jittered) rectangle; return (masked image, binary mask).

    Deterministic in (image, spec, rng_seed).  The mask is float32 with
    1.0 inside the hole.
    """
    img = require_image(image, "occlusion input")
    spec.validate()
    size = img.shape[0]
    rng = np.random.default_rng(rng_seed)
    offsets = rng.uniform(-spec.jitter, spec.jitter, size=4)
    top = min(max(spec.top + offsets[0], 0.0), 1.0)
    bottom = min(max(spec.bottom + offsets[1], 0.0), 1.0)
    left = min(max(spec.left + offsets[2], 0.0), 1.0)
    right = min(max(spec.right + offsets[3], 0.0), 1.0)

    r0, r1 = round_half_up(top * size), round_half_up(bottom * size)
    c0, c1 = round_half_up(left * size), round_half_up(right * size)
    if r0 >= r1 or c0 >= c1:
        raise MaskError(
            f"degenerate rectangle after jitter: rows [{r0},{r1}), cols [{c0},{c1})"
        )

    mask = np.zeros((size, size), dtype=np.float32)
    mask[r0:r1, c0:c1] = 1.0
    masked = np.where(mask[..., None] == 1.0, np.float32(HOLE_FILL_VALUE), img)
    return masked, mask

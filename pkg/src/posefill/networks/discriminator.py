"""Patch discriminators: a grid of real/fake scores over local receptive fields.

The same stack serves both the context discriminator (conditioned on the
occluded input) and the pose discriminator (conditioned on the pose map).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..errors import ShapeError, SpecError
from .tensorutil import image_to_tensor, init_gaussian

MAX_WIDTH_MULT = 8


@dataclass(frozen=True)
class DiscriminatorSpec:
    """Candidate (3ch) and condition (3ch) are concatenated at the input."""

    in_channels: int = 6
    n_layers: int = 3
    base_width: int = 64

    def validate(self) -> None:
        if self.n_layers < 1:
            raise SpecError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.base_width < 1 or self.in_channels < 1:
            raise SpecError("base_width and in_channels must be >= 1")

    def grid_size(self, image_size: int) -> int:
        """Closed-form output grid for a given input size."""
        n = image_size
        for _ in range(self.n_layers):
            n = (n + 2 - 4) // 2 + 1
        n = n - 1  # penultimate stride-1 conv, k4 p1
        n = n - 1  # score conv, k4 p1
        if n < 1:
            raise SpecError(f"input size {image_size} too small for {self.n_layers} layers")
        return n


class PatchDiscriminator(nn.Module):
    """Stride-2 conv stack, width doubling, leaky slope 0.2, no norm first."""

    def __init__(self, spec: DiscriminatorSpec):
        super().__init__()
        spec.validate()
        self.spec = spec
        w = spec.base_width
        layers: list[nn.Module] = [
            nn.Conv2d(spec.in_channels, w, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
        ]
        mult = 1
        for i in range(1, spec.n_layers):
            prev, mult = mult, min(2**i, MAX_WIDTH_MULT)
            layers += [
                nn.Conv2d(w * prev, w * mult, 4, stride=2, padding=1),
                nn.InstanceNorm2d(w * mult, affine=False),
                nn.LeakyReLU(0.2),
            ]
        prev, mult = mult, min(2**spec.n_layers, MAX_WIDTH_MULT)
        layers += [
            nn.Conv2d(w * prev, w * mult, 4, stride=1, padding=1),
            nn.InstanceNorm2d(w * mult, affine=False),
            nn.LeakyReLU(0.2),
            nn.Conv2d(w * mult, 1, 4, stride=1, padding=1),
        ]
        self.model = nn.Sequential(*layers)

    def forward(self, candidate: torch.Tensor, condition: torch.Tensor) -> torch.Tensor:
        """Raw (pre-sigmoid) patch scores, shape B x 1 x g x g."""
        if candidate.shape[-2:] != condition.shape[-2:]:
            raise ShapeError(
                f"candidate {tuple(candidate.shape)} vs condition {tuple(condition.shape)} spatial mismatch"
            )
        return self.model(torch.cat([candidate, condition], dim=1))


def build_patch_discriminator(spec: DiscriminatorSpec, rng_seed: int) -> PatchDiscriminator:
    disc = PatchDiscriminator(spec)
    init_gaussian(disc, rng_seed)
    return disc


def discriminator_forward(disc: PatchDiscriminator, candidate: np.ndarray,
                          condition: np.ndarray) -> np.ndarray:
    """Image-level scoring; returns the g x g score grid as an array."""
    if candidate.shape != condition.shape:
        raise ShapeError(f"shapes differ: {candidate.shape} vs {condition.shape}")
    with torch.no_grad():
        scores = disc(image_to_tensor(candidate).unsqueeze(0),
                      image_to_tensor(condition).unsqueeze(0))
    return scores.squeeze(0).squeeze(0).numpy()

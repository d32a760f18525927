"""U-Net generator: encoder-decoder with mirrored skip concatenation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
import torch.nn.functional as F

from ..errors import ShapeError, SpecError
from .tensorutil import image_to_tensor, init_gaussian, tensor_to_image

MAX_WIDTH_MULT = 8


@dataclass(frozen=True)
class GeneratorSpec:
    """Shape parameters of the inpainting generator.

    Inputs are the channel concatenation of occluded image, reference
    image, and pose map (3 + 3 + 3 = 9 channels).
    """

    image_size: int = 128
    in_channels: int = 9
    out_channels: int = 3
    base_width: int = 64
    depth: int | None = None

    def resolved_depth(self) -> int:
        return self.depth if self.depth is not None else int(math.log2(self.image_size)) - 2

    def validate(self) -> None:
        n = self.image_size
        if n < 32 or (n & (n - 1)) != 0:
            raise SpecError(f"image_size must be a power of 2 >= 32, got {n}")
        d = self.resolved_depth()
        if not (1 <= d <= int(math.log2(n)) - 1):
            raise SpecError(f"depth {d} leaves no valid bottleneck for size {n}")
        if self.base_width < 1:
            raise SpecError(f"base_width must be >= 1, got {self.base_width}")

    def encoder_widths(self) -> list[int]:
        return [self.base_width * min(2**i, MAX_WIDTH_MULT) for i in range(self.resolved_depth())]


class Generator(nn.Module):
    """U-Net: stride-2 encoder, mirrored decoder, skips from level i to N-i.

    Deterministic in its inputs (no sampled noise); the final tanh keeps
    outputs in [-1, 1].
    """

    def __init__(self, spec: GeneratorSpec):
        super().__init__()
        spec.validate()
        self.spec = spec
        widths = spec.encoder_widths()
        depth = spec.resolved_depth()

        self.encoders = nn.ModuleList()
        in_ch = spec.in_channels
        for i, w in enumerate(widths):
            block = [nn.Conv2d(in_ch, w, 4, stride=2, padding=1)]
            if 0 < i < depth - 1:
                block.append(nn.InstanceNorm2d(w, affine=False))
            self.encoders.append(nn.Sequential(*block))
            in_ch = w

        self.decoders = nn.ModuleList()
        for i in range(depth - 1, 0, -1):
            dec_in = widths[i] if i == depth - 1 else widths[i] * 2
            block = [nn.ConvTranspose2d(dec_in, widths[i - 1], 4, stride=2, padding=1),
                     nn.InstanceNorm2d(widths[i - 1], affine=False)]
            self.decoders.append(nn.Sequential(*block))
        final_in = widths[0] * 2 if depth > 1 else widths[0]
        self.final = nn.ConvTranspose2d(final_in, spec.out_channels, 4, stride=2, padding=1)

    def forward(self, masked: torch.Tensor, reference: torch.Tensor,
                pose_map: torch.Tensor) -> torch.Tensor:
        for name, t in (("masked", masked), ("reference", reference), ("pose_map", pose_map)):
            if t.dim() != 4 or t.shape[-1] != self.spec.image_size or t.shape[-2] != self.spec.image_size:
                raise ShapeError(
                    f"{name}: expected Bx3x{self.spec.image_size}x{self.spec.image_size}, got {tuple(t.shape)}"
                )
        x = torch.cat([masked, reference, pose_map], dim=1)
        if x.shape[1] != self.spec.in_channels:
            raise ShapeError(f"concatenated inputs have {x.shape[1]} channels, spec wants {self.spec.in_channels}")

        skips = []
        h = x
        for enc in self.encoders:
            h = enc(h)
            skips.append(h)
            h = F.leaky_relu(h, 0.2)
        for i, dec in enumerate(self.decoders):
            if i > 0:
                h = torch.cat([h, skips[len(skips) - 1 - i]], dim=1)
            h = F.relu(dec(h))
        if len(skips) > 1:
            h = torch.cat([h, skips[0]], dim=1)
        return torch.tanh(self.final(h))


def build_generator(spec: GeneratorSpec, rng_seed: int) -> Generator:
    """Construct a generator with seeded N(0, 0.02^2) weight init."""
    gen = Generator(spec)
    init_gaussian(gen, rng_seed)
    return gen


def generator_forward(gen: Generator, masked: np.ndarray, reference: np.ndarray,
                      pose_map: np.ndarray) -> np.ndarray:
    """Image-level forward pass: full-frame prediction in [-1, 1]."""
    if masked.shape != reference.shape or masked.shape != pose_map.shape:
        raise ShapeError(
            f"input shapes differ: {masked.shape}, {reference.shape}, {pose_map.shape}"
        )
    with torch.no_grad():
        out = gen(image_to_tensor(masked).unsqueeze(0),
                  image_to_tensor(reference).unsqueeze(0),
                  image_to_tensor(pose_map).unsqueeze(0))
    return tensor_to_image(out)

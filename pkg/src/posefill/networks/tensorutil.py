"""numpy <-> torch conversion and parameter bookkeeping helpers."""

from __future__ import annotations

import hashlib

import numpy as np
import torch
from torch import nn


def image_to_tensor(img: np.ndarray) -> torch.Tensor:
    """HxWx3 float image -> 3xHxW float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(img.transpose(2, 0, 1))).float()


def images_to_batch(images: list[np.ndarray]) -> torch.Tensor:
    return torch.stack([image_to_tensor(im) for im in images], dim=0)


def tensor_to_image(t: torch.Tensor) -> np.ndarray:
    """3xHxW (or 1x3xHxW) tensor -> HxWx3 float32 array."""
    if t.dim() == 4:
        t = t.squeeze(0)
    return t.detach().cpu().float().numpy().transpose(1, 2, 0)


def mask_to_tensor(mask: np.ndarray) -> torch.Tensor:
    """HxW binary map -> 1xHxW float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(mask)).float().unsqueeze(0)


def init_gaussian(module: nn.Module, seed: int, std: float = 0.02) -> None:
    """Zero-mean Gaussian init for all conv weights, zero biases; seeded."""
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for m in module.modules():
            if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
                m.weight.copy_(torch.randn(m.weight.shape, generator=g) * std)
                if m.bias is not None:
                    m.bias.zero_()


def param_checksum(module: nn.Module) -> str:
    """sha256 over all parameter bytes, in registration order."""
    h = hashlib.sha256()
    for name, p in sorted(module.state_dict().items()):
        h.update(name.encode())
        h.update(p.detach().cpu().contiguous().numpy().tobytes())
    return h.hexdigest()

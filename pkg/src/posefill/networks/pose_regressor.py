"""Head-pose regression from occluded faces: 5 conv stages, 2 FC stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
import torch.nn.functional as F

from ..errors import TrainingError
from ..datagen.align import align_face
from ..datagen.manifest import DatasetManifest
from ..datagen.occlusion import DEFAULT_TRAIN_MASK, MaskSpec, apply_occlusion
from ..datagen.posemap import POSE_CLAMP_DEG, PoseAngles
from ..imgio import load_image
from .tensorutil import image_to_tensor, images_to_batch, init_gaussian


@dataclass
class PoseRegressorConfig:
    image_size: int = 64
    base_width: int = 16
    epochs: int = 60
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    mask_spec: MaskSpec = DEFAULT_TRAIN_MASK


class PoseRegressor(nn.Module):
    """5 stride-2 convolutions into 2 fully connected stages -> 3 angles.

    Outputs are tanh-normalized and scaled to degrees, so predictions
    always land in [-90, 90].
    """

    def __init__(self, image_size: int = 64, base_width: int = 16):
        super().__init__()
        if image_size % 32 != 0:
            raise TrainingError(f"image_size must be a multiple of 32, got {image_size}")
        self.image_size = image_size
        w = base_width
        chans = [3, w, w * 2, w * 4, w * 4, w * 8]
        self.convs = nn.ModuleList(
            nn.Conv2d(chans[i], chans[i + 1], 4, 2, 1) for i in range(5)
        )
        flat = chans[-1] * (image_size // 32) ** 2
        self.fc1 = nn.Linear(flat, 64)
        self.fc2 = nn.Linear(64, 3)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Normalized (pitch, yaw, roll) in [-1, 1]."""
        h = x
        for conv in self.convs:
            h = F.leaky_relu(conv(h), 0.2)
        h = F.relu(self.fc1(h.flatten(1)))
        return torch.tanh(self.fc2(h))


def pose_regress(model: PoseRegressor, image: np.ndarray) -> PoseAngles:
    """Predict the head pose of one occluded [-1,1] image, in degrees."""
    if image.shape[0] != model.image_size:
        raise TrainingError(
            f"regressor expects {model.image_size}px inputs, got {image.shape[0]}"
        )
    with torch.no_grad():
        norm = model(image_to_tensor(image).unsqueeze(0)).squeeze(0)
    p, y, r = (float(v) * POSE_CLAMP_DEG for v in norm)
    return PoseAngles(pitch=p, yaw=y, roll=r)


def train_pose_regressor(manifest: DatasetManifest,
                         config: PoseRegressorConfig | None = None) -> PoseRegressor:
    """Fit the regressor on occluded train-split images with known poses."""
    config = config or PoseRegressorConfig()
    train_idx = manifest.split_indices("train")
    if not train_idx:
        raise TrainingError("manifest has no train split")

    images, targets = [], []
    for i in train_idx:
        rec = manifest.records[i]
        aligned = align_face(load_image(manifest.resolve_path(i)), rec.landmarks, config.image_size)
        occluded, _ = apply_occlusion(aligned, config.mask_spec, rng_seed=config.seed * 100003 + i)
        images.append(occluded)
        targets.append([rec.pose.pitch / POSE_CLAMP_DEG,
                        rec.pose.yaw / POSE_CLAMP_DEG,
                        rec.pose.roll / POSE_CLAMP_DEG])
    x_all = images_to_batch(images)
    y_all = torch.tensor(targets, dtype=torch.float32)

    model = PoseRegressor(image_size=config.image_size, base_width=config.base_width)
    init_gaussian(model, config.seed)
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    g = torch.Generator().manual_seed(config.seed)

    n = len(train_idx)
    for _ in range(config.epochs):
        order = torch.randperm(n, generator=g)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            loss = F.mse_loss(model(x_all[idx]), y_all[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
    model.eval()
    return model


def save_pose_regressor(model: PoseRegressor, path) -> None:
    from ..container import module_blobs, write_container
    metadata = {
        "kind": "pose_regressor",
        "image_size": model.image_size,
        "base_width": model.convs[0].out_channels,
    }
    write_container(path, metadata, module_blobs(model, "pose_regressor"))


def load_pose_regressor(path) -> PoseRegressor:
    from ..container import apply_blobs, read_container
    from ..errors import CheckpointError
    header, blobs = read_container(path)
    if header.get("kind") != "pose_regressor":
        raise CheckpointError(f"{path} is not a pose regressor")
    model = PoseRegressor(image_size=header["image_size"], base_width=header["base_width"])
    apply_blobs(model, blobs, "pose_regressor")
    model.eval()
    return model


def pose_error_degrees(model: PoseRegressor, manifest: DatasetManifest,
                       split: str = "test",
                       mask_spec: MaskSpec = DEFAULT_TRAIN_MASK,
                       seed: int = 0) -> dict[str, float]:
    """Mean absolute per-angle error on occluded images of a split."""
    idx = manifest.split_indices(split)
    if not idx:
        raise TrainingError(f"manifest has no {split} split")
    errs = np.zeros(3)
    for i in idx:
        rec = manifest.records[i]
        aligned = align_face(load_image(manifest.resolve_path(i)), rec.landmarks, model.image_size)
        occluded, _ = apply_occlusion(aligned, mask_spec, rng_seed=seed * 100003 + i)
        pred = pose_regress(model, occluded)
        errs += np.abs(np.array(pred.as_tuple()) - np.array(rec.pose.as_tuple()))
    errs /= len(idx)
    return {"pitch": float(errs[0]), "yaw": float(errs[1]), "roll": float(errs[2])}

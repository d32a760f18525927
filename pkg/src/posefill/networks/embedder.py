"""Identity embedding network: a small face classifier whose penultimate
feature layer serves as a frozen identity descriptor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
import torch.nn.functional as F

from ..errors import TrainingError
from ..datagen.align import align_face
from ..datagen.manifest import DatasetManifest
from ..imgio import load_image
from .tensorutil import image_to_tensor, images_to_batch, init_gaussian


@dataclass
class EmbedderConfig:
    embed_dim: int = 128
    native_size: int = 64
    base_width: int = 16
    epochs: int = 40
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0


class IdentityEmbedder(nn.Module):
    """Conv classifier; `embed` exposes the D-dim penultimate feature.

    Once frozen, no parameter changes during generator training, but
    gradients still flow through it to the generated image.
    """

    def __init__(self, embed_dim: int = 128, n_classes: int = 2,
                 native_size: int = 64, base_width: int = 16):
        super().__init__()
        self.embed_dim = embed_dim
        self.native_size = native_size
        self.frozen = False
        w = base_width
        self.convs = nn.Sequential(
            nn.Conv2d(3, w, 4, 2, 1), nn.LeakyReLU(0.2),
            nn.Conv2d(w, w * 2, 4, 2, 1), nn.LeakyReLU(0.2),
            nn.Conv2d(w * 2, w * 4, 4, 2, 1), nn.LeakyReLU(0.2),
            nn.Conv2d(w * 4, w * 8, 4, 2, 1), nn.LeakyReLU(0.2),
        )
        flat = w * 8 * (native_size // 16) ** 2
        self.fc_embed = nn.Linear(flat, embed_dim)
        self.fc_head = nn.Linear(embed_dim, n_classes)

    def features(self, x: torch.Tensor) -> torch.Tensor:
        """B x 3 x H x W -> B x D; inputs resized to the native size."""
        if x.shape[-1] != self.native_size or x.shape[-2] != self.native_size:
            x = F.interpolate(x, size=(self.native_size, self.native_size),
                              mode="bilinear", align_corners=False)
        h = self.convs(x)
        return self.fc_embed(h.flatten(1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.fc_head(F.relu(self.features(x)))

    def freeze(self) -> None:
        for p in self.parameters():
            p.requires_grad_(False)
        self.eval()
        self.frozen = True

    def embed(self, image: np.ndarray) -> np.ndarray:
        """Single [-1,1] image -> finite D-vector (no grad, params untouched)."""
        with torch.no_grad():
            vec = self.features(image_to_tensor(image).unsqueeze(0))
        return vec.squeeze(0).numpy()


def embed_identity(embedder: IdentityEmbedder, image: np.ndarray) -> np.ndarray:
    return embedder.embed(image)


def pretrain_identity_embedder(manifest: DatasetManifest,
                               config: EmbedderConfig | None = None) -> IdentityEmbedder:
    """Train an identity classifier on the train split, then freeze it.

    The classification head stays on the module (harmless) but only the
    penultimate feature is used downstream.
    """
    config = config or EmbedderConfig()
    identities = sorted(manifest.identities)
    if len(identities) < 2:
        raise TrainingError(f"need >= 2 identities to pretrain, got {len(identities)}")
    label_of = {ident: i for i, ident in enumerate(identities)}

    train_idx = manifest.split_indices("train")
    if not train_idx:
        raise TrainingError("manifest has no train split")
    images, labels = [], []
    for i in train_idx:
        rec = manifest.records[i]
        img = align_face(load_image(manifest.resolve_path(i)), rec.landmarks, config.native_size)
        images.append(img)
        labels.append(label_of[rec.identity_id])
    x_all = images_to_batch(images)
    y_all = torch.tensor(labels, dtype=torch.long)

    model = IdentityEmbedder(embed_dim=config.embed_dim, n_classes=len(identities),
                             native_size=config.native_size, base_width=config.base_width)
    init_gaussian(model, config.seed)
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    g = torch.Generator().manual_seed(config.seed)

    model.train()
    n = len(train_idx)
    for _ in range(config.epochs):
        order = torch.randperm(n, generator=g)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            logits = model(x_all[idx])
            loss = F.cross_entropy(logits, y_all[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()

    model.freeze()
    return model


def save_embedder(model: IdentityEmbedder, path) -> None:
    from ..container import module_blobs, write_container
    metadata = {
        "kind": "identity_embedder",
        "embed_dim": model.embed_dim,
        "native_size": model.native_size,
        "base_width": model.convs[0].out_channels,
        "n_classes": model.fc_head.out_features,
        "frozen": model.frozen,
    }
    write_container(path, metadata, module_blobs(model, "embedder"))


def load_embedder(path) -> IdentityEmbedder:
    from ..container import apply_blobs, read_container
    from ..errors import CheckpointError
    header, blobs = read_container(path)
    if header.get("kind") != "identity_embedder":
        raise CheckpointError(f"{path} is not an identity embedder")
    model = IdentityEmbedder(embed_dim=header["embed_dim"], n_classes=header["n_classes"],
                             native_size=header["native_size"], base_width=header["base_width"])
    apply_blobs(model, blobs, "embedder")
    model.freeze()
    return model


def classification_accuracy(model: IdentityEmbedder, manifest: DatasetManifest,
                            split: str = "test") -> float:
    """Identity classification accuracy on a manifest split."""
    identities = sorted(manifest.identities)
    label_of = {ident: i for i, ident in enumerate(identities)}
    idx = manifest.split_indices(split)
    if not idx:
        raise TrainingError(f"manifest has no {split} split")
    correct = 0
    with torch.no_grad():
        for i in idx:
            rec = manifest.records[i]
            img = align_face(load_image(manifest.resolve_path(i)), rec.landmarks, model.native_size)
            pred = model(image_to_tensor(img).unsqueeze(0)).argmax(dim=1).item()
            correct += int(pred == label_of[rec.identity_id])
    return correct / len(idx)

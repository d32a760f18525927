"""Single-image inference: generator prediction composited into the input."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from ..container import apply_blobs, read_container
from ..datagen.pairing import TrainingSample
from ..datagen.posemap import PoseAngles, render_pose_map
from ..errors import ShapeError
from ..networks.generator import Generator, GeneratorSpec
from ..networks.tensorutil import image_to_tensor, tensor_to_image


def composite(prediction: np.ndarray, masked: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Hole pixels from the prediction, everything else bit-equal to input."""
    if prediction.shape != masked.shape or mask.shape != masked.shape[:2]:
        raise ShapeError(
            f"composite shapes: pred {prediction.shape}, masked {masked.shape}, mask {mask.shape}"
        )
    return np.where(mask[..., None] == 1.0, prediction, masked)


class InferenceModel:
    """A trained generator plus its spec, loaded once and reused."""

    def __init__(self, generator: Generator):
        self.generator = generator
        self.generator.eval()

    @property
    def image_size(self) -> int:
        return self.generator.spec.image_size

    @classmethod
    def from_checkpoint(cls, path: str | Path) -> "InferenceModel":
        header, blobs = read_container(path)
        spec = GeneratorSpec(**header["specs"]["generator"])
        gen = Generator(spec)
        apply_blobs(gen, blobs, "gen")
        return cls(gen)

    def predict(self, masked: np.ndarray, reference: np.ndarray,
                pose_map: np.ndarray) -> np.ndarray:
        """Raw full-frame generator output in [-1, 1]."""
        with torch.no_grad():
            out = self.generator(image_to_tensor(masked).unsqueeze(0),
                                 image_to_tensor(reference).unsqueeze(0),
                                 image_to_tensor(pose_map).unsqueeze(0))
        return tensor_to_image(out)

    def infer_sample(self, sample: TrainingSample) -> np.ndarray:
        """Composited inpainting of a prepared training sample."""
        pred = self.predict(sample.masked, sample.reference, sample.pose_map)
        return composite(pred, sample.masked, sample.mask)


def infer_single(model: InferenceModel, masked: np.ndarray, mask: np.ndarray,
                 reference: np.ndarray, pose: PoseAngles) -> np.ndarray:
    """Inpaint one occluded image; outside-mask pixels stay bit-equal."""
    if masked.shape != reference.shape:
        raise ShapeError(f"masked {masked.shape} vs reference {reference.shape}")
    if mask.shape != masked.shape[:2]:
        raise ShapeError(f"mask {mask.shape} does not match image {masked.shape}")
    pose_map = render_pose_map(pose, masked.shape[0])
    pred = model.predict(masked, reference, pose_map)
    return composite(pred, masked, mask)

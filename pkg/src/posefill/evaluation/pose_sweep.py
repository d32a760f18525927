"""Pose conditioning sweeps: re-render the same hole under different poses."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from ..datagen.pairing import TrainingSample
from ..datagen.posemap import PoseAngles, render_pose_map
from ..imgio import save_image

CAPTION_HEIGHT = 14


@dataclass
class PoseSweepResult:
    poses: list[PoseAngles]
    cells: list[np.ndarray]

    def in_mask_l1(self, mask: np.ndarray, i: int, j: int) -> float:
        """Mean absolute in-hole difference between two cells."""
        hole = mask[..., None] == 1.0
        diff = np.abs(self.cells[i] - self.cells[j])
        return float(diff[np.broadcast_to(hole, diff.shape)].mean())


def pose_sweep(model, sample: TrainingSample, poses: list[PoseAngles]) -> PoseSweepResult:
    """Inpaint the sample once per pose; backgrounds stay bit-identical."""
    if not poses:
        raise ValueError("poses must be non-empty")
    cells = []
    for pose in poses:
        swept = TrainingSample(
            masked=sample.masked, mask=sample.mask, reference=sample.reference,
            pose_map=render_pose_map(pose, sample.masked.shape[0]), target=sample.target)
        cells.append(model.infer_sample(swept))
    return PoseSweepResult(poses=list(poses), cells=cells)


def render_contact_sheet(result: PoseSweepResult) -> np.ndarray:
    """One row of cells with a caption strip naming each pose; uint8 RGB."""
    size = result.cells[0].shape[0]
    sheet = Image.new("RGB", (size * len(result.cells), size + CAPTION_HEIGHT), "black")
    draw = ImageDraw.Draw(sheet)
    for k, (pose, cell) in enumerate(zip(result.poses, result.cells)):
        u8 = np.clip(np.floor((cell + 1.0) * 127.5 + 0.5), 0, 255).astype(np.uint8)
        sheet.paste(Image.fromarray(u8), (k * size, 0))
        label = f"{pose.pitch:.0f},{pose.yaw:.0f},{pose.roll:.0f}"
        draw.text((k * size + 2, size + 1), label, fill="white")
    return np.asarray(sheet)


def save_contact_sheet(result: PoseSweepResult, path: str | Path) -> Path:
    path = Path(path)
    sheet = render_contact_sheet(result)
    save_image(sheet.astype(np.float32) / 127.5 - 1.0, path)
    return path

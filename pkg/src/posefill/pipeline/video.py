"""Frame-sequence inference with a single reference image.

Frames are zero-padded numbered PNGs; the per-frame pose comes from a
fixed value, a tracker-export CSV (frame,pitch,yaw,roll in degrees), or
the pose regressor applied to the occluded frame.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..datagen.occlusion import DEFAULT_EVAL_MASK, MaskSpec, apply_occlusion
from ..datagen.posemap import PoseAngles, render_pose_map
from ..errors import IoError, PoseSourceError
from ..evaluation.metrics import psnr, ssim
from ..imgio import load_image, save_image
from ..networks.pose_regressor import PoseRegressor, load_pose_regressor, pose_regress
from .infer import InferenceModel, composite

OCCLUSION_SEED = 0


@dataclass
class PoseSource:
    """Where each frame's pose comes from: fixed | per_frame_file | regressor."""

    kind: str
    fixed_pose: PoseAngles | None = None
    file: Path | None = None
    regressor: Path | PoseRegressor | None = None

    def validate(self) -> None:
        if self.kind == "fixed":
            if self.fixed_pose is None:
                raise PoseSourceError("fixed pose source needs fixed_pose")
        elif self.kind == "per_frame_file":
            if self.file is None:
                raise PoseSourceError("per_frame_file pose source needs file")
        elif self.kind == "regressor":
            if self.regressor is None:
                raise PoseSourceError("regressor pose source needs a regressor")
        else:
            raise PoseSourceError(f"unknown pose source kind {self.kind!r}")


@dataclass
class VideoJob:
    frame_dir: Path
    reference_image: Path
    pose_source: PoseSource
    checkpoint: Path
    out_dir: Path
    mask_spec: MaskSpec = field(default_factory=lambda: DEFAULT_EVAL_MASK)
    gt_dir: Path | None = None


def list_frames(frame_dir: Path) -> list[Path]:
    frames = sorted(p for p in Path(frame_dir).glob("*.png"))
    if not frames:
        raise IoError(f"no PNG frames in {frame_dir}")
    return frames


def load_pose_file(path: Path) -> dict[str, PoseAngles]:
    poses: dict[str, PoseAngles] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            expected = ["frame", "pitch", "yaw", "roll"]
            if reader.fieldnames is None or list(reader.fieldnames) != expected:
                raise PoseSourceError(
                    f"pose CSV columns must be {expected}, got {reader.fieldnames}")
            for row in reader:
                poses[str(row["frame"])] = PoseAngles(
                    float(row["pitch"]), float(row["yaw"]), float(row["roll"]))
    except OSError as exc:
        raise PoseSourceError(f"cannot read pose CSV {path}: {exc}") from exc
    return poses


def _frame_image(path: Path, size: int) -> np.ndarray:
    img = load_image(path)
    if img.shape[0] != img.shape[1]:
        raise IoError(f"frame {path.name} is not square: {img.shape[:2]}")
    if img.shape[0] != size:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB").resize((size, size), Image.BILINEAR),
                             dtype=np.float32)
        img = arr / 127.5 - 1.0
    return img


def _pose_for_frame(source: PoseSource, stem: str, occluded: np.ndarray,
                    file_poses: dict[str, PoseAngles] | None,
                    regressor: PoseRegressor | None) -> PoseAngles:
    if source.kind == "fixed":
        return source.fixed_pose
    if source.kind == "per_frame_file":
        pose = file_poses.get(stem)
        if pose is None:
            # tracker exports sometimes index frames as bare integers
            try:
                pose = file_poses.get(str(int(stem)))
            except ValueError:
                pose = None
        if pose is None:
            raise PoseSourceError(f"no pose row for frame {stem!r}")
        return pose
    return pose_regress(regressor, occluded)


def infer_video(job: VideoJob) -> list[Path]:
    """Inpaint every frame; returns output paths in frame order.

    The reference is loaded once and reused.  When gt_dir is given, a
    per-frame metrics CSV (frame,psnr,ssim,temporal_l1) is written next
    to the outputs; temporal_l1 is the mean in-mask change between
    consecutive outputs (reported, never constrained).
    """
    job.pose_source.validate()
    model = InferenceModel.from_checkpoint(job.checkpoint)
    size = model.image_size
    frames = list_frames(job.frame_dir)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    reference = _frame_image(Path(job.reference_image), size)
    file_poses = (load_pose_file(Path(job.pose_source.file))
                  if job.pose_source.kind == "per_frame_file" else None)
    regressor = None
    if job.pose_source.kind == "regressor":
        reg = job.pose_source.regressor
        regressor = reg if isinstance(reg, PoseRegressor) else load_pose_regressor(reg)

    out_paths: list[Path] = []
    metrics_rows: list[str] = []
    prev_output = None
    prev_mask = None
    for frame_path in frames:
        frame = _frame_image(frame_path, size)
        masked, mask = apply_occlusion(frame, job.mask_spec, rng_seed=OCCLUSION_SEED)
        pose = _pose_for_frame(job.pose_source, frame_path.stem, masked,
                               file_poses, regressor)
        pred = model.predict(masked, reference, render_pose_map(pose, size))
        output = composite(pred, masked, mask)
        out_path = out_dir / frame_path.name
        save_image(output, out_path)
        out_paths.append(out_path)

        temporal = float("nan")
        if prev_output is not None:
            hole = (mask == 1.0) & (prev_mask == 1.0)
            if hole.any():
                temporal = float(np.abs(output - prev_output)[hole].mean())
        if job.gt_dir is not None:
            gt = _frame_image(Path(job.gt_dir) / frame_path.name, size)
            metrics_rows.append(
                f"{frame_path.stem},{psnr(output, gt):.6g},{ssim(output, gt):.6g},"
                f"{'' if math.isnan(temporal) else f'{temporal:.6g}'}")
        prev_output, prev_mask = output, mask

    if job.gt_dir is not None:
        (out_dir / "frame_metrics.csv").write_text(
            "frame,psnr,ssim,temporal_l1\n" + "\n".join(metrics_rows) + "\n")
    return out_paths

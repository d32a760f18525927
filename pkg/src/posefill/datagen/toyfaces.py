"""Procedural face-like image generator for desk-scale runs.

Each identity samples appearance attributes (skin tone, eye color and
shape, eyebrow thickness, face oval, mouth); each image samples a head
pose that shifts and shears the features, so pose is visible in the
pixels and the exact landmarks are known by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import IoError
from ..imgio import save_image
from .manifest import DatasetManifest, FaceRecord, assign_split
from .posemap import PoseAngles

POSE_RANGES = {"pitch": (-30.0, 30.0), "yaw": (-45.0, 45.0), "roll": (-15.0, 15.0)}


@dataclass(frozen=True)
class IdentityParams:
    skin: tuple[float, float, float]
    iris: tuple[float, float, float]
    background: float
    face_rx: float
    face_ry: float
    eye_spacing: float
    eye_radius: float
    eye_aspect: float
    brow_thickness: float
    mouth_halfwidth: float


def sample_identity(seed_parts: list[int]) -> IdentityParams:
    rng = np.random.default_rng(seed_parts)
    r = rng.uniform(0.45, 0.95)
    g = r * rng.uniform(0.6, 0.95)
    b = g * rng.uniform(0.55, 0.95)
    return IdentityParams(
        skin=(r, g, b),
        iris=tuple(rng.uniform(0.05, 0.9, size=3)),
        background=rng.uniform(0.05, 0.3),
        face_rx=rng.uniform(0.30, 0.40),
        face_ry=rng.uniform(0.38, 0.48),
        eye_spacing=rng.uniform(0.13, 0.18),
        eye_radius=rng.uniform(0.045, 0.07),
        eye_aspect=rng.uniform(0.5, 0.9),
        brow_thickness=rng.uniform(0.010, 0.030),
        mouth_halfwidth=rng.uniform(0.09, 0.15),
    )


def _soft_ellipse(grid, cx, cy, rx, ry, edge_px=1.0):
    xx, yy = grid
    d = np.sqrt(((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2)
    # alpha falls from 1 to 0 over ~edge_px pixels at the boundary
    return np.clip((1.0 - d) * min(rx, ry) / edge_px, 0.0, 1.0)


def _paint(canvas, alpha, color):
    canvas += alpha[..., None] * (np.asarray(color, dtype=np.float64) - canvas)


def render_toy_face(
    identity: IdentityParams, pose: PoseAngles, size: int, image_seed_parts: list[int]
) -> tuple[np.ndarray, dict[str, tuple[float, float]]]:
    """Draw one face; returns ([-1,1] image, landmark dict in pixels)."""
    rng = np.random.default_rng(image_seed_parts)
    light = rng.uniform(0.85, 1.1)

    s = float(size)
    cx, cy = 0.5 * s, 0.53 * s
    yaw_r = math.radians(pose.yaw)
    pitch_r = math.radians(pose.pitch)
    roll_r = math.radians(pose.roll)
    cos_roll, sin_roll = math.cos(roll_r), math.sin(roll_r)

    def place(ox: float, oy: float, parallax: float = 1.0) -> tuple[float, float]:
        # canonical offsets (fractions of size) -> posed pixel position
        px = ox * math.cos(yaw_r) + math.sin(yaw_r) * 0.16 * parallax
        py = oy * math.cos(0.5 * pitch_r) + math.sin(pitch_r) * 0.11 * parallax
        rx = px * cos_roll - py * sin_roll
        ry = px * sin_roll + py * cos_roll
        return cx + rx * s, cy + ry * s

    xx, yy = np.meshgrid(np.arange(size) + 0.5, np.arange(size) + 0.5)
    grid = (xx, yy)
    canvas = np.full((size, size, 3), identity.background, dtype=np.float64)

    skin = np.array(identity.skin) * light
    face_cx, face_cy = place(0.0, 0.0, parallax=0.35)
    face_rx = identity.face_rx * s * (0.9 + 0.1 * math.cos(yaw_r))
    face_ry = identity.face_ry * s
    _paint(canvas, _soft_ellipse(grid, face_cx, face_cy, face_rx, face_ry), skin)

    # eyes + brows
    eye_y = -0.10
    left_eye = place(-identity.eye_spacing, eye_y)
    right_eye = place(identity.eye_spacing, eye_y)
    er = identity.eye_radius * s
    for ex, ey in (left_eye, right_eye):
        _paint(canvas, _soft_ellipse(grid, ex, ey, er, er * identity.eye_aspect), (0.95, 0.95, 0.95))
        _paint(canvas, _soft_ellipse(grid, ex, ey, er * 0.55, er * 0.55 * identity.eye_aspect),
               np.array(identity.iris) * light)
        _paint(canvas, _soft_ellipse(grid, ex, ey, er * 0.22, er * 0.22), (0.05, 0.05, 0.05))
        brow_y = ey - er * identity.eye_aspect - 0.035 * s
        _paint(canvas, _soft_ellipse(grid, ex, brow_y, er * 1.2, identity.brow_thickness * s),
               (0.12, 0.08, 0.05))

    # nose: wedge above the tip, tip is the landmark
    nose_tip = place(0.0, 0.055, parallax=1.35)
    _paint(canvas, _soft_ellipse(grid, nose_tip[0], nose_tip[1] - 0.03 * s, 0.028 * s, 0.05 * s),
           skin * 0.82)

    # mouth
    mouth_c = place(0.0, 0.205)
    mw = identity.mouth_halfwidth * s * math.cos(yaw_r)
    _paint(canvas, _soft_ellipse(grid, mouth_c[0], mouth_c[1], mw, 0.028 * s),
           (min(skin[0] * 1.05, 1.0), skin[1] * 0.45, skin[2] * 0.45))
    dxm, dym = mw * cos_roll, mw * sin_roll
    mouth_left = (mouth_c[0] - dxm, mouth_c[1] - dym)
    mouth_right = (mouth_c[0] + dxm, mouth_c[1] + dym)

    canvas += rng.normal(0.0, 0.01, size=canvas.shape)
    canvas = np.clip(canvas, 0.0, 1.0)

    landmarks = {
        "left_eye": left_eye,
        "right_eye": right_eye,
        "nose_tip": nose_tip,
        "mouth_left": mouth_left,
        "mouth_right": mouth_right,
    }
    return (canvas * 2.0 - 1.0).astype(np.float32), landmarks


def sample_pose(image_seed_parts: list[int]) -> PoseAngles:
    rng = np.random.default_rng(image_seed_parts)
    return PoseAngles(
        pitch=float(rng.uniform(*POSE_RANGES["pitch"])),
        yaw=float(rng.uniform(*POSE_RANGES["yaw"])),
        roll=float(rng.uniform(*POSE_RANGES["roll"])),
    )


def generate_toy_dataset(
    n_identities: int,
    images_per_identity: int,
    size: int,
    rng_seed: int,
    out_dir: str | Path,
) -> DatasetManifest:
    """Write a procedural face dataset plus its manifest to out_dir.

    Deterministic given the seed: every image and the manifest are
    byte-identical across runs.  Each record gets its own seed derived
    from (rng_seed, identity index, image index), so rendering order
    does not matter.
    """
    if n_identities < 2:
        raise ValueError(f"need >= 2 identities, got {n_identities}")
    if images_per_identity < 2:
        raise ValueError(f"need >= 2 images per identity, got {images_per_identity}")
    out_dir = Path(out_dir)
    try:
        (out_dir / "images").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create dataset directory {out_dir}: {exc}") from exc

    records: list[FaceRecord] = []
    for id_idx in range(n_identities):
        identity_id = f"id_{id_idx:03d}"
        identity = sample_identity([rng_seed, id_idx])
        splits = assign_split(images_per_identity)
        for img_idx in range(images_per_identity):
            pose = sample_pose([rng_seed, id_idx, img_idx, 0])
            image, landmarks = render_toy_face(identity, pose, size, [rng_seed, id_idx, img_idx, 1])
            rel = f"images/{identity_id}_{img_idx:03d}.png"
            save_image(image, out_dir / rel)
            records.append(
                FaceRecord(
                    identity_id=identity_id,
                    image_path=rel,
                    landmarks=landmarks,
                    pose=pose,
                    split=splits[img_idx],
                )
            )

    manifest = DatasetManifest(records=records, image_size=size, root=out_dir)
    manifest.save(out_dir / "manifest.jsonl")
    return manifest

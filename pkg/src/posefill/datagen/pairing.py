"""Training sample assembly: target, hole, reference, pose map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PairingError
from ..imgio import load_image
from .align import align_face
from .manifest import DatasetManifest
from .occlusion import DEFAULT_TRAIN_MASK, MaskSpec, apply_occlusion
from .posemap import render_pose_map


@dataclass
class TrainingSample:
    """One generator training quintuple.

    masked:    occluded face (hole zeroed)
    mask:      H x W float binary map, 1 = hole
    reference: occlusion-free image of the reference identity
    pose_map:  constant 3-channel pose encoding of the target's pose
    target:    ground-truth aligned face
    """

    masked: np.ndarray
    mask: np.ndarray
    reference: np.ndarray
    pose_map: np.ndarray
    target: np.ndarray


def sample_training_pair(
    manifest: DatasetManifest,
    record_index: int,
    rng_seed: int,
    cross_identity: str | None = None,
    out_size: int | None = None,
    mask_spec: MaskSpec = DEFAULT_TRAIN_MASK,
) -> TrainingSample:
    """Build the training quintuple for one record.

    The reference is drawn (seeded) from the record's identity, excluding
    the record itself, or from `cross_identity` when given.
    """
    record = manifest.records[record_index]
    out_size = out_size or manifest.image_size

    if cross_identity is not None:
        if cross_identity not in manifest.identities:
            raise PairingError(f"unknown cross identity {cross_identity!r}")
        candidates = [i for i in manifest.identities[cross_identity] if i != record_index]
    else:
        candidates = [i for i in manifest.identities[record.identity_id] if i != record_index]
    if not candidates:
        raise PairingError(
            f"identity {record.identity_id!r} has no other record to use as reference"
        )

    rng = np.random.default_rng(rng_seed)
    ref_index = candidates[int(rng.integers(len(candidates)))]
    occlusion_seed = int(rng.integers(2**31))

    target = align_face(load_image(manifest.resolve_path(record_index)), record.landmarks, out_size)
    masked, mask = apply_occlusion(target, mask_spec, occlusion_seed)
    pose_map = render_pose_map(record.pose, out_size)
    ref_record = manifest.records[ref_index]
    reference = align_face(
        load_image(manifest.resolve_path(ref_index)), ref_record.landmarks, out_size
    )
    return TrainingSample(masked=masked, mask=mask, reference=reference,
                          pose_map=pose_map, target=target)

"""Dataset construction: alignment, occlusion, pose maps, toy faces."""

from .align import LANDMARK_NAMES, align_face, transform_landmarks
from .manifest import DatasetManifest, FaceRecord, import_landmark_csv
from .occlusion import DEFAULT_EVAL_MASK, DEFAULT_TRAIN_MASK, MaskSpec, apply_occlusion
from .pairing import TrainingSample, sample_training_pair
from .posemap import PoseAngles, render_pose_map
from .toyfaces import generate_toy_dataset

__all__ = [
    "LANDMARK_NAMES",
    "align_face",
    "transform_landmarks",
    "DatasetManifest",
    "FaceRecord",
    "import_landmark_csv",
    "MaskSpec",
    "DEFAULT_TRAIN_MASK",
    "DEFAULT_EVAL_MASK",
    "apply_occlusion",
    "TrainingSample",
    "sample_training_pair",
    "PoseAngles",
    "render_pose_map",
    "generate_toy_dataset",
]

"""Network definitions: generator, patch discriminators, identity embedder,
pose regressor."""

from .discriminator import (
    DiscriminatorSpec,
    PatchDiscriminator,
    build_patch_discriminator,
    discriminator_forward,
)
from .embedder import (
    EmbedderConfig,
    IdentityEmbedder,
    classification_accuracy,
    embed_identity,
    load_embedder,
    pretrain_identity_embedder,
    save_embedder,
)
from .generator import Generator, GeneratorSpec, build_generator, generator_forward
from .pose_regressor import (
    PoseRegressor,
    PoseRegressorConfig,
    load_pose_regressor,
    pose_error_degrees,
    pose_regress,
    save_pose_regressor,
    train_pose_regressor,
)
from .tensorutil import (
    image_to_tensor,
    images_to_batch,
    init_gaussian,
    mask_to_tensor,
    param_checksum,
    tensor_to_image,
)

__all__ = [
    "DiscriminatorSpec",
    "PatchDiscriminator",
    "build_patch_discriminator",
    "discriminator_forward",
    "EmbedderConfig",
    "IdentityEmbedder",
    "classification_accuracy",
    "load_embedder",
    "save_embedder",
    "embed_identity",
    "pretrain_identity_embedder",
    "Generator",
    "GeneratorSpec",
    "build_generator",
    "generator_forward",
    "PoseRegressor",
    "PoseRegressorConfig",
    "pose_error_degrees",
    "load_pose_regressor",
    "save_pose_regressor",
    "pose_regress",
    "train_pose_regressor",
    "image_to_tensor",
    "images_to_batch",
    "init_gaussian",
    "mask_to_tensor",
    "param_checksum",
    "tensor_to_image",
]

"""Training: alternating optimization, checkpointing, ablation runs."""

from .ablation import AblationReport, AblationRow, run_ablation
from .config import (
    TrainConfig,
    config_hash,
    config_to_text,
    parse_config_text,
    parse_overrides,
    train_config_from_mapping,
)
from .loop import (
    TrainState,
    init_train_state,
    latest_checkpoint,
    load_checkpoint,
    save_checkpoint,
    train,
    train_step,
)

__all__ = [
    "AblationReport",
    "AblationRow",
    "run_ablation",
    "TrainConfig",
    "config_hash",
    "config_to_text",
    "parse_config_text",
    "parse_overrides",
    "train_config_from_mapping",
    "TrainState",
    "init_train_state",
    "latest_checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "train",
    "train_step",
]

"""Training configuration and the flat key=value config file format."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields

from ..datagen.occlusion import DEFAULT_TRAIN_MASK, MaskSpec
from ..errors import ConfigError
from ..losses import LossWeights

VARIANTS = ("full", "l1_gan", "l1_gan_id")
ABLATION_ORDER = ("l1_gan", "l1_gan_id", "full")


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 16
    learning_rate: float = 2e-4
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    weights: LossWeights = field(default_factory=LossWeights)
    seed: int = 0
    image_size: int = 128
    checkpoint_every: int = 200
    variant: str = "full"
    # network shape knobs for desk-scale runs
    gen_base_width: int = 64
    disc_base_width: int = 64
    disc_layers: int = 3
    # conditioning of the context discriminator: both branches see the
    # occluded input ("masked") or the ground truth ("target")
    global_condition: str = "masked"
    data_workers: int = 0
    mask: MaskSpec = field(default_factory=lambda: DEFAULT_TRAIN_MASK)

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.global_condition not in ("masked", "target"):
            raise ConfigError(f"global_condition must be masked|target, got {self.global_condition!r}")
        self.weights.validate()
        self.mask.validate()
        if self.mask.area_fraction() > 0.75:
            raise ConfigError(
                f"training mask covers {self.mask.area_fraction():.2f} of the image (max 0.75)"
            )

    def effective_weights(self) -> LossWeights:
        return self.weights.for_variant(self.variant)


def _flat_fields(cfg: TrainConfig) -> dict[str, object]:
    out: dict[str, object] = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "weights":
            for wf in fields(LossWeights):
                out[f"weights.{wf.name}"] = getattr(value, wf.name)
        elif f.name == "mask":
            for mf in fields(MaskSpec):
                out[f"mask.{mf.name}"] = getattr(value, mf.name)
        else:
            out[f.name] = value
    return out


TRAIN_KEYS = frozenset(_flat_fields(TrainConfig()))


def parse_config_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines; # starts a comment; blank lines skipped."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def _coerce(key: str, value: str, target) -> object:
    try:
        if isinstance(target, bool):
            return value.lower() in ("1", "true", "yes")
        if isinstance(target, int):
            return int(value)
        if isinstance(target, float):
            return float(value)
        return value
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {value!r}: {exc}") from exc


def train_config_from_mapping(mapping: dict[str, str],
                              base: TrainConfig | None = None) -> TrainConfig:
    """Build a TrainConfig from flat keys; unknown keys are errors."""
    cfg = base or TrainConfig()
    flat = _flat_fields(cfg)
    weights = dict(cfg.weights.__dict__)
    mask = dict(cfg.mask.__dict__)
    plain: dict[str, object] = {}
    for key, value in mapping.items():
        if key not in TRAIN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        coerced = _coerce(key, value, flat[key])
        if key.startswith("weights."):
            weights[key.split(".", 1)[1]] = coerced
        elif key.startswith("mask."):
            mask[key.split(".", 1)[1]] = coerced
        else:
            plain[key] = coerced
    cfg = TrainConfig(**{**{f.name: getattr(cfg, f.name) for f in fields(TrainConfig)
                            if f.name not in ("weights", "mask")},
                         **plain,
                         "weights": LossWeights(**weights),
                         "mask": MaskSpec(**mask)})
    cfg.validate()
    return cfg


def config_to_text(cfg: TrainConfig) -> str:
    """Flat, sorted key = value dump (the resolved_config echo format)."""
    flat = _flat_fields(cfg)
    return "\n".join(f"{k} = {flat[k]}" for k in sorted(flat)) + "\n"


def config_hash(cfg: TrainConfig) -> str:
    return hashlib.sha256(config_to_text(cfg).encode()).hexdigest()


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    """Parse --set key=value override arguments."""
    mapping: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not key=value")
        key, value = pair.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping

"""Alternating adversarial optimization of the generator and both
discriminators, with deterministic data order and resumable state."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..datagen.manifest import DatasetManifest
from ..datagen.pairing import TrainingSample, sample_training_pair
from ..errors import CheckpointError, NumericsError, TrainingError
from ..losses import (
    LossReport,
    adversarial_d_loss,
    adversarial_g_loss,
    gate_pose_gradient,
    identity_loss,
    reconstruction_loss,
    total_generator_loss,
)
from ..container import (
    apply_blobs,
    module_blobs,
    optimizer_blobs,
    read_container,
    restore_optimizer,
    spec_dict,
    write_container,
)
from ..networks.discriminator import DiscriminatorSpec, PatchDiscriminator, build_patch_discriminator
from ..networks.generator import Generator, GeneratorSpec, build_generator
from ..networks.tensorutil import images_to_batch, mask_to_tensor
from .config import TrainConfig, config_hash

CHECKPOINT_SUFFIX = ".ckpt"


@dataclass
class TrainState:
    config: TrainConfig
    generator: Generator
    disc_global: PatchDiscriminator
    disc_pose: PatchDiscriminator
    opt_g: torch.optim.Adam
    opt_dg: torch.optim.Adam
    opt_dp: torch.optim.Adam
    step: int = 0
    epoch: int = 0
    step_in_epoch: int = 0
    embedder: object | None = field(default=None, repr=False)


def generator_spec_for(config: TrainConfig) -> GeneratorSpec:
    return GeneratorSpec(image_size=config.image_size, base_width=config.gen_base_width)


def discriminator_spec_for(config: TrainConfig) -> DiscriminatorSpec:
    return DiscriminatorSpec(in_channels=6, n_layers=config.disc_layers,
                             base_width=config.disc_base_width)


def init_train_state(config: TrainConfig, embedder=None) -> TrainState:
    """Fresh networks and optimizers, init seeds derived from config.seed."""
    config.validate()
    gen = build_generator(generator_spec_for(config), rng_seed=config.seed)
    d_spec = discriminator_spec_for(config)
    d_global = build_patch_discriminator(d_spec, rng_seed=config.seed + 1)
    d_pose = build_patch_discriminator(d_spec, rng_seed=config.seed + 2)
    betas = (config.adam_beta1, config.adam_beta2)
    lr = config.learning_rate
    return TrainState(
        config=config,
        generator=gen,
        disc_global=d_global,
        disc_pose=d_pose,
        opt_g=torch.optim.Adam(gen.parameters(), lr=lr, betas=betas),
        opt_dg=torch.optim.Adam(d_global.parameters(), lr=lr, betas=betas),
        opt_dp=torch.optim.Adam(d_pose.parameters(), lr=lr, betas=betas),
        embedder=embedder,
    )


def batch_tensors(batch: list[TrainingSample]):
    masked = images_to_batch([s.masked for s in batch])
    reference = images_to_batch([s.reference for s in batch])
    pose_map = images_to_batch([s.pose_map for s in batch])
    target = images_to_batch([s.target for s in batch])
    mask = torch.stack([mask_to_tensor(s.mask) for s in batch], dim=0)
    return masked, reference, pose_map, target, mask


def train_step(state: TrainState, batch: list[TrainingSample],
               config: TrainConfig | None = None) -> LossReport:
    """One alternating update: context discriminator, pose discriminator,
    then the generator on the composite objective."""
    config = config or state.config
    if not batch:
        raise TrainingError("empty batch")
    weights = config.effective_weights()
    masked, reference, pose_map, target, mask = batch_tensors(batch)
    condition = masked if config.global_condition == "masked" else target

    fake = state.generator(masked, reference, pose_map)
    report = LossReport()

    if weights.alpha_global > 0:
        d_loss = adversarial_d_loss(state.disc_global, target, fake, condition)
        state.opt_dg.zero_grad()
        d_loss.backward()
        state.opt_dg.step()
        report.l_d_global = float(d_loss.detach())

    if weights.gamma_pose > 0:
        d_loss = adversarial_d_loss(state.disc_pose, target, fake, pose_map)
        state.opt_dp.zero_grad()
        d_loss.backward()
        state.opt_dp.step()
        report.l_d_pose = float(d_loss.detach())

    l_r = reconstruction_loss(fake, target) if weights.lambda_r > 0 else 0.0
    l_id = 0.0
    if weights.mu_id > 0:
        if state.embedder is None:
            raise TrainingError("identity loss enabled but no embedder provided")
        l_id = identity_loss(fake, reference, state.embedder)
    l_adv_g = (adversarial_g_loss(state.disc_global, fake, condition)
               if weights.alpha_global > 0 else 0.0)
    l_adv_p = (adversarial_g_loss(state.disc_pose, gate_pose_gradient(fake, mask), pose_map)
               if weights.gamma_pose > 0 else 0.0)

    total = total_generator_loss(l_r, l_id, l_adv_g, l_adv_p, weights)
    if isinstance(total, torch.Tensor) and total.requires_grad:
        state.opt_g.zero_grad()
        total.backward()
        state.opt_g.step()

    report.l_r = float(l_r) if not isinstance(l_r, torch.Tensor) else float(l_r.detach())
    report.l_id = float(l_id) if not isinstance(l_id, torch.Tensor) else float(l_id.detach())
    report.l_adv_global_g = (float(l_adv_g) if not isinstance(l_adv_g, torch.Tensor)
                             else float(l_adv_g.detach()))
    report.l_adv_pose_g = (float(l_adv_p) if not isinstance(l_adv_p, torch.Tensor)
                           else float(l_adv_p.detach()))
    report.l_total_g = float(total) if not isinstance(total, torch.Tensor) else float(total.detach())

    values = [report.l_r, report.l_id, report.l_adv_global_g, report.l_adv_pose_g,
              report.l_total_g, report.l_d_global, report.l_d_pose]
    if not all(math.isfinite(v) for v in values):
        raise NumericsError(
            f"non-finite loss at step {state.step + 1}: "
            f"l_r={report.l_r} l_id={report.l_id} l_adv_global_g={report.l_adv_global_g} "
            f"l_adv_pose_g={report.l_adv_pose_g} l_d_global={report.l_d_global} "
            f"l_d_pose={report.l_d_pose}")
    return report


def sample_seed(seed: int, epoch: int, record_index: int) -> int:
    return int(np.random.SeedSequence([seed, epoch, record_index]).generate_state(1)[0])


def epoch_order(manifest: DatasetManifest, seed: int, epoch: int) -> list[int]:
    indices = manifest.split_indices("train")
    rng = np.random.default_rng([seed, epoch])
    return [indices[i] for i in rng.permutation(len(indices))]


def build_batch(manifest: DatasetManifest, record_indices: list[int],
                config: TrainConfig, epoch: int) -> list[TrainingSample]:
    def build(i: int) -> TrainingSample:
        return sample_training_pair(manifest, i, rng_seed=sample_seed(config.seed, epoch, i),
                                    out_size=config.image_size, mask_spec=config.mask)
    if config.data_workers > 0:
        with ThreadPoolExecutor(max_workers=config.data_workers) as pool:
            return list(pool.map(build, record_indices))
    return [build(i) for i in record_indices]


def save_checkpoint(state: TrainState, path: str | Path) -> None:
    blobs = {}
    blobs.update(module_blobs(state.generator, "gen"))
    blobs.update(module_blobs(state.disc_global, "d_global"))
    blobs.update(module_blobs(state.disc_pose, "d_pose"))
    opt_steps = {}
    for opt, module, prefix in ((state.opt_g, state.generator, "opt_g"),
                                (state.opt_dg, state.disc_global, "opt_dg"),
                                (state.opt_dp, state.disc_pose, "opt_dp")):
        moment_blobs, steps = optimizer_blobs(opt, module, prefix)
        blobs.update(moment_blobs)
        opt_steps[prefix] = steps
    metadata = {
        "epoch": state.epoch,
        "step": state.step,
        "step_in_epoch": state.step_in_epoch,
        "specs": {
            "generator": spec_dict(generator_spec_for(state.config)),
            "disc_global": spec_dict(discriminator_spec_for(state.config)),
            "disc_pose": spec_dict(discriminator_spec_for(state.config)),
        },
        "loss_weights": dict(state.config.weights.__dict__),
        "rng": {"seed": state.config.seed, "epoch": state.epoch,
                "step_in_epoch": state.step_in_epoch},
        "config_hash": config_hash(state.config),
        "config_text": _config_text(state.config),
        "optimizer_steps": opt_steps,
    }
    write_container(path, metadata, blobs)


def _config_text(config: TrainConfig) -> str:
    from .config import config_to_text
    return config_to_text(config)


def load_checkpoint(path: str | Path, embedder=None) -> TrainState:
    """Rebuild a TrainState (networks, moments, counters) from a container."""
    header, blobs = read_container(path)
    from .config import parse_config_text, train_config_from_mapping
    config = train_config_from_mapping(parse_config_text(header["config_text"]))
    if config_hash(config) != header["config_hash"]:
        raise CheckpointError(f"{path}: config hash mismatch")
    state = init_train_state(config, embedder=embedder)
    apply_blobs(state.generator, blobs, "gen")
    apply_blobs(state.disc_global, blobs, "d_global")
    apply_blobs(state.disc_pose, blobs, "d_pose")
    for opt, module, prefix in ((state.opt_g, state.generator, "opt_g"),
                                (state.opt_dg, state.disc_global, "opt_dg"),
                                (state.opt_dp, state.disc_pose, "opt_dp")):
        restore_optimizer(opt, module, prefix, blobs, header["optimizer_steps"][prefix])
    state.step = int(header["step"])
    state.epoch = int(header["epoch"])
    state.step_in_epoch = int(header["step_in_epoch"])
    return state


def latest_checkpoint(out_dir: str | Path) -> Path | None:
    ckpts = sorted(Path(out_dir).glob(f"ckpt_step*{CHECKPOINT_SUFFIX}"))
    return ckpts[-1] if ckpts else None


def _truncate_loss_csv(csv_path: Path, keep_steps: int) -> None:
    if not csv_path.exists():
        return
    lines = csv_path.read_text().splitlines()
    kept = [lines[0]] if lines else [LossReport.CSV_HEADER]
    for line in lines[1:]:
        try:
            if int(line.split(",", 1)[0]) <= keep_steps:
                kept.append(line)
        except ValueError:
            continue
    csv_path.write_text("\n".join(kept) + "\n")


def train(config: TrainConfig, manifest: DatasetManifest, embedder=None,
          out_dir: str | Path = "runs/train", resume: bool = False,
          stop_when=None) -> Path:
    """Epoch loop with per-step loss logging and periodic checkpoints.

    Returns the final checkpoint path.  `stop_when(report) -> bool` allows
    early exit (used by the overfit harness); checkpoints are still
    written on exit.
    """
    config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "losses.csv"

    if not manifest.split_indices("train"):
        raise TrainingError("manifest has no train split")

    state = None
    if resume:
        latest = latest_checkpoint(out_dir)
        if latest is not None:
            state = load_checkpoint(latest, embedder=embedder)
            if config_hash(config) != config_hash(state.config):
                raise CheckpointError("resume config differs from checkpoint config")
            _truncate_loss_csv(csv_path, state.step)
    if state is None:
        state = init_train_state(config, embedder=embedder)
        csv_path.write_text(LossReport.CSV_HEADER + "\n")

    def checkpoint_path() -> Path:
        return out_dir / f"ckpt_step{state.step:08d}{CHECKPOINT_SUFFIX}"

    stop = False
    while state.epoch < config.epochs and not stop:
        order = epoch_order(manifest, config.seed, state.epoch)
        batches = [order[i:i + config.batch_size]
                   for i in range(0, len(order), config.batch_size)]
        for batch_idx, record_indices in enumerate(batches):
            if batch_idx < state.step_in_epoch:
                continue
            batch = build_batch(manifest, record_indices, config, state.epoch)
            report = train_step(state, batch, config)
            state.step += 1
            state.step_in_epoch += 1
            with open(csv_path, "a", encoding="utf-8") as fh:
                fh.write(report.csv_row(state.step) + "\n")
            if config.checkpoint_every > 0 and state.step % config.checkpoint_every == 0:
                save_checkpoint(state, checkpoint_path())
            if stop_when is not None and stop_when(report):
                stop = True
                break
        if not stop:
            state.epoch += 1
            state.step_in_epoch = 0
        save_checkpoint(state, checkpoint_path())
    return checkpoint_path()

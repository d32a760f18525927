"""Command-line interface.

Every subcommand reads an optional flat config file (key = value lines)
plus repeated --set key=value overrides; frequently used options also
exist as direct flags (dashes in flags map to underscores in keys).
Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from ..datagen.manifest import DatasetManifest, import_landmark_csv
from ..datagen.occlusion import MaskSpec
from ..datagen.posemap import PoseAngles
from ..datagen.toyfaces import generate_toy_dataset
from ..errors import ConfigError, PosefillError
from ..trainer.config import (
    TRAIN_KEYS,
    TrainConfig,
    parse_config_text,
    parse_overrides,
    train_config_from_mapping,
)

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="posefill",
                     description="identity-preserving pose-conditioned face inpainting")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, flags: tuple[str, ...] = ()) -> None:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="flat key=value config file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
        for flag in flags:
            p.add_argument(f"--{flag}", type=str, default=None)

    add("gen-toy-data", "write a procedural toy face dataset",
        ("out-dir", "n-identities", "images-per-identity", "size", "seed"))
    add("prepare-data", "build a manifest from a landmark CSV",
        ("csv", "image-root", "out"))
    add("pretrain-embedder", "train and freeze the identity embedder",
        ("manifest", "out"))
    add("train", "train the inpainting networks",
        ("manifest", "out-dir", "embedder", "resume"))
    add("train-pose-regressor", "train the head-pose regressor",
        ("manifest", "out"))
    add("evaluate", "score a checkpoint on the test split",
        ("manifest", "checkpoint", "embedder", "out-dir"))
    add("infer", "inpaint a single image",
        ("checkpoint", "input", "reference", "pose", "out"))
    add("infer-video", "inpaint a frame sequence",
        ("checkpoint", "frames", "reference", "out-dir", "pose-source", "pose",
         "pose-file", "pose-regressor", "gt-dir"))
    add("pose-sweep", "render one sample under several poses",
        ("checkpoint", "manifest", "record", "poses", "out"))
    add("ablation", "train and score the three loss variants",
        ("manifest", "embedder", "out-dir", "seeds"))
    add("benchmark", "measure inference throughput",
        ("checkpoint", "size", "frames"))
    return parser


def _mapping_from_args(args) -> dict[str, str]:
    """config file < --set overrides < direct flags."""
    mapping: dict[str, str] = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        mapping.update(parse_config_text(path.read_text(encoding="utf-8")))
    mapping.update(parse_overrides(args.overrides))
    for key, value in vars(args).items():
        if key in ("command", "config", "overrides") or value is None:
            continue
        mapping[key] = str(value)
    return mapping


def _take(mapping: dict[str, str], key: str, default=None, required: bool = False):
    if key in mapping:
        return mapping.pop(key)
    if required:
        raise ConfigError(f"missing required key {key!r}")
    return default


def _reject_unknown(mapping: dict[str, str], command: str) -> None:
    if mapping:
        raise ConfigError(f"unknown keys for {command}: {sorted(mapping)}")


def _split_train_keys(mapping: dict[str, str]) -> dict[str, str]:
    return {k: mapping.pop(k) for k in list(mapping) if k in TRAIN_KEYS}


def _write_resolved_config(out_dir: Path, entries: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"{k} = {entries[k]}" for k in sorted(entries)]
    (out_dir / "resolved_config.cfg").write_text("\n".join(lines) + "\n")


def _resolved_entries(config: TrainConfig | None, extra: dict) -> dict:
    from ..trainer.config import config_to_text
    entries = dict(extra)
    if config is not None:
        for line in config_to_text(config).splitlines():
            key, value = line.split(" = ", 1)
            entries[key] = value
    return entries


def _parse_pose(text: str) -> PoseAngles:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"pose must be 'pitch,yaw,roll', got {text!r}")
    try:
        return PoseAngles(*(float(p) for p in parts))
    except ValueError as exc:
        raise ConfigError(f"cannot parse pose {text!r}: {exc}") from exc


def _parse_pose_list(text: str) -> list[PoseAngles]:
    poses = [_parse_pose(chunk) for chunk in text.split(";") if chunk.strip()]
    if not poses:
        raise ConfigError(f"no poses in {text!r}")
    return poses


def _mask_from_mapping(mapping: dict[str, str]) -> MaskSpec:
    fields = {}
    for key in list(mapping):
        if key.startswith("mask."):
            fields[key.split(".", 1)[1]] = float(mapping.pop(key))
    return MaskSpec(**fields) if fields else MaskSpec()


def _cmd_gen_toy_data(mapping) -> int:
    out_dir = Path(_take(mapping, "out_dir", required=True))
    n_ids = int(_take(mapping, "n_identities", 10))
    per_id = int(_take(mapping, "images_per_identity", 20))
    size = int(_take(mapping, "size", 64))
    seed = int(_take(mapping, "seed", 0))
    _reject_unknown(mapping, "gen-toy-data")
    manifest = generate_toy_dataset(n_ids, per_id, size, seed, out_dir)
    _write_resolved_config(out_dir, {"out_dir": out_dir, "n_identities": n_ids,
                                     "images_per_identity": per_id, "size": size,
                                     "seed": seed})
    print(f"wrote {len(manifest.records)} records to {out_dir / 'manifest.jsonl'}")
    return 0


def _cmd_prepare_data(mapping) -> int:
    csv_path = Path(_take(mapping, "csv", required=True))
    image_root = Path(_take(mapping, "image_root", required=True))
    out = Path(_take(mapping, "out", required=True))
    _reject_unknown(mapping, "prepare-data")
    manifest = import_landmark_csv(csv_path, image_root)
    manifest.save(out)
    print(f"wrote {len(manifest.records)} records to {out}")
    return 0


def _cmd_pretrain_embedder(mapping) -> int:
    from ..networks.embedder import (
        EmbedderConfig,
        classification_accuracy,
        pretrain_identity_embedder,
        save_embedder,
    )

    manifest_path = Path(_take(mapping, "manifest", required=True))
    out = Path(_take(mapping, "out", required=True))
    config = EmbedderConfig(
        embed_dim=int(_take(mapping, "embed_dim", 128)),
        native_size=int(_take(mapping, "native_size", 64)),
        base_width=int(_take(mapping, "base_width", 16)),
        epochs=int(_take(mapping, "epochs", 40)),
        batch_size=int(_take(mapping, "batch_size", 32)),
        learning_rate=float(_take(mapping, "learning_rate", 1e-3)),
        seed=int(_take(mapping, "seed", 0)),
    )
    _reject_unknown(mapping, "pretrain-embedder")
    manifest = DatasetManifest.load(manifest_path)
    model = pretrain_identity_embedder(manifest, config)
    save_embedder(model, out)
    if manifest.split_indices("test"):
        acc = classification_accuracy(model, manifest, "test")
        print(f"held-out identity accuracy: {acc:.3f}")
    print(f"wrote embedder to {out}")
    return 0


def _cmd_train(mapping) -> int:
    from ..networks.embedder import load_embedder
    from ..trainer.loop import train

    manifest_path = Path(_take(mapping, "manifest", required=True))
    out_dir = Path(_take(mapping, "out_dir", required=True))
    embedder_path = _take(mapping, "embedder")
    resume = str(_take(mapping, "resume", "false")).lower() in ("1", "true", "yes")
    config = train_config_from_mapping(_split_train_keys(mapping))
    _reject_unknown(mapping, "train")

    manifest = DatasetManifest.load(manifest_path)
    embedder = load_embedder(embedder_path) if embedder_path else None
    if embedder is None and config.effective_weights().mu_id > 0:
        raise ConfigError("identity loss is enabled; pass embedder = <path> "
                          "or set weights.mu_id = 0")
    _write_resolved_config(out_dir, _resolved_entries(config, {
        "manifest": manifest_path, "out_dir": out_dir,
        "embedder": embedder_path or "", "resume": resume}))
    ckpt = train(config, manifest, embedder=embedder, out_dir=out_dir, resume=resume)
    print(f"final checkpoint: {ckpt}")
    return 0


def _cmd_train_pose_regressor(mapping) -> int:
    from ..networks.pose_regressor import (
        PoseRegressorConfig,
        pose_error_degrees,
        save_pose_regressor,
        train_pose_regressor,
    )

    manifest_path = Path(_take(mapping, "manifest", required=True))
    out = Path(_take(mapping, "out", required=True))
    config = PoseRegressorConfig(
        image_size=int(_take(mapping, "image_size", 64)),
        base_width=int(_take(mapping, "base_width", 16)),
        epochs=int(_take(mapping, "epochs", 60)),
        batch_size=int(_take(mapping, "batch_size", 32)),
        learning_rate=float(_take(mapping, "learning_rate", 1e-3)),
        seed=int(_take(mapping, "seed", 0)),
    )
    _reject_unknown(mapping, "train-pose-regressor")
    manifest = DatasetManifest.load(manifest_path)
    model = train_pose_regressor(manifest, config)
    save_pose_regressor(model, out)
    if manifest.split_indices("test"):
        err = pose_error_degrees(model, manifest)
        print("held-out mean absolute error (deg): "
              f"pitch {err['pitch']:.2f}, yaw {err['yaw']:.2f}, roll {err['roll']:.2f}")
    print(f"wrote pose regressor to {out}")
    return 0


def _cmd_evaluate(mapping) -> int:
    from ..evaluation.evaluate import evaluate, write_report
    from ..networks.embedder import load_embedder
    from .infer import InferenceModel

    manifest_path = Path(_take(mapping, "manifest", required=True))
    ckpt = Path(_take(mapping, "checkpoint", required=True))
    embedder_path = Path(_take(mapping, "embedder", required=True))
    out_dir = Path(_take(mapping, "out_dir", required=True))
    seed = int(_take(mapping, "seed", 0))
    _reject_unknown(mapping, "evaluate")

    manifest = DatasetManifest.load(manifest_path)
    model = InferenceModel.from_checkpoint(ckpt)
    embedder = load_embedder(embedder_path)
    report = evaluate(model.infer_sample, manifest, embedder,
                      image_size=model.image_size, seed=seed)
    write_report(report, out_dir)
    _write_resolved_config(out_dir, {"manifest": manifest_path, "checkpoint": ckpt,
                                     "embedder": embedder_path, "out_dir": out_dir,
                                     "seed": seed})
    print(report.to_table())
    return 0


def _cmd_infer(mapping) -> int:
    from ..datagen.occlusion import apply_occlusion
    from ..imgio import save_image
    from .infer import InferenceModel, infer_single
    from .video import _frame_image

    ckpt = Path(_take(mapping, "checkpoint", required=True))
    input_path = Path(_take(mapping, "input", required=True))
    reference_path = Path(_take(mapping, "reference", required=True))
    pose = _parse_pose(_take(mapping, "pose", "0,0,0"))
    out = Path(_take(mapping, "out", required=True))
    mask_spec = _mask_from_mapping(mapping)
    seed = int(_take(mapping, "seed", 0))
    _reject_unknown(mapping, "infer")

    model = InferenceModel.from_checkpoint(ckpt)
    image = _frame_image(input_path, model.image_size)
    reference = _frame_image(reference_path, model.image_size)
    masked, mask = apply_occlusion(image, mask_spec, rng_seed=seed)
    save_image(infer_single(model, masked, mask, reference, pose), out)
    print(f"wrote {out}")
    return 0


def _cmd_infer_video(mapping) -> int:
    from .video import PoseSource, VideoJob, infer_video

    ckpt = Path(_take(mapping, "checkpoint", required=True))
    frames = Path(_take(mapping, "frames", required=True))
    reference = Path(_take(mapping, "reference", required=True))
    out_dir = Path(_take(mapping, "out_dir", required=True))
    kind = _take(mapping, "pose_source", "fixed")
    pose = _take(mapping, "pose")
    pose_file = _take(mapping, "pose_file")
    pose_regressor = _take(mapping, "pose_regressor")
    gt_dir = _take(mapping, "gt_dir")
    mask_spec = _mask_from_mapping(mapping)
    _reject_unknown(mapping, "infer-video")

    source = PoseSource(
        kind=kind,
        fixed_pose=(_parse_pose(pose) if pose is not None
                    else (PoseAngles(0.0, 0.0, 0.0) if kind == "fixed" else None)),
        file=Path(pose_file) if pose_file else None,
        regressor=Path(pose_regressor) if pose_regressor else None,
    )
    job = VideoJob(frame_dir=frames, reference_image=reference, pose_source=source,
                   checkpoint=ckpt, out_dir=out_dir, mask_spec=mask_spec,
                   gt_dir=Path(gt_dir) if gt_dir else None)
    outputs = infer_video(job)
    _write_resolved_config(out_dir, {
        "checkpoint": ckpt, "frames": frames, "reference": reference,
        "out_dir": out_dir, "pose_source": kind, "pose": pose or "",
        "pose_file": pose_file or "", "pose_regressor": pose_regressor or "",
        "gt_dir": gt_dir or "",
        **{f"mask.{k}": v for k, v in mask_spec.__dict__.items()}})
    print(f"wrote {len(outputs)} frames to {out_dir}")
    return 0


def _cmd_pose_sweep(mapping) -> int:
    from ..datagen.occlusion import DEFAULT_EVAL_MASK
    from ..datagen.pairing import sample_training_pair
    from ..evaluation.pose_sweep import pose_sweep, save_contact_sheet
    from .infer import InferenceModel

    ckpt = Path(_take(mapping, "checkpoint", required=True))
    manifest_path = Path(_take(mapping, "manifest", required=True))
    poses = _parse_pose_list(_take(mapping, "poses", required=True))
    out = Path(_take(mapping, "out", "pose_sweep.png"))
    record = _take(mapping, "record")
    seed = int(_take(mapping, "seed", 0))
    _reject_unknown(mapping, "pose-sweep")

    manifest = DatasetManifest.load(manifest_path)
    model = InferenceModel.from_checkpoint(ckpt)
    index = int(record) if record is not None else manifest.split_indices("test")[0]
    sample = sample_training_pair(manifest, index, rng_seed=seed,
                                  out_size=model.image_size, mask_spec=DEFAULT_EVAL_MASK)
    result = pose_sweep(model, sample, poses)
    save_contact_sheet(result, out)
    print(f"wrote {len(result.cells)}-cell sweep to {out}")
    return 0


def _cmd_ablation(mapping) -> int:
    import dataclasses

    from ..networks.embedder import load_embedder
    from ..trainer.ablation import run_ablation

    manifest_path = Path(_take(mapping, "manifest", required=True))
    embedder_path = _take(mapping, "embedder", required=True)
    out_dir = Path(_take(mapping, "out_dir", required=True))
    seeds = [int(s) for s in str(_take(mapping, "seeds", "0")).split(",") if s.strip()]
    config = train_config_from_mapping(_split_train_keys(mapping))
    _reject_unknown(mapping, "ablation")

    manifest = DatasetManifest.load(manifest_path)
    embedder = load_embedder(embedder_path)
    _write_resolved_config(out_dir, _resolved_entries(config, {
        "manifest": manifest_path, "embedder": embedder_path,
        "out_dir": out_dir, "seeds": ",".join(map(str, seeds))}))
    for seed in seeds:
        seed_config = dataclasses.replace(config, seed=seed)
        report = run_ablation(seed_config, manifest, embedder, out_dir / f"seed_{seed}")
        print(f"seed {seed}:")
        print(report.to_table())
    return 0


def _cmd_benchmark(mapping) -> int:
    from .benchmark import run_benchmark
    from .infer import InferenceModel

    ckpt = _take(mapping, "checkpoint")
    size = int(_take(mapping, "size", 128))
    frames = int(_take(mapping, "frames", 20))
    _reject_unknown(mapping, "benchmark")

    model = InferenceModel.from_checkpoint(ckpt) if ckpt else None
    result = run_benchmark(model=model, image_size=size, frames=frames)
    print(result.summary())
    return 0


_COMMANDS = {
    "gen-toy-data": _cmd_gen_toy_data,
    "prepare-data": _cmd_prepare_data,
    "pretrain-embedder": _cmd_pretrain_embedder,
    "train": _cmd_train,
    "train-pose-regressor": _cmd_train_pose_regressor,
    "evaluate": _cmd_evaluate,
    "infer": _cmd_infer,
    "infer-video": _cmd_infer_video,
    "pose-sweep": _cmd_pose_sweep,
    "ablation": _cmd_ablation,
    "benchmark": _cmd_benchmark,
}


def cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        mapping = _mapping_from_args(args)
        return _COMMANDS[args.command](mapping)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except PosefillError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except Exception:  # noqa: BLE001 - CLI boundary
        traceback.print_exc()
        return RUNTIME_EXIT


def main() -> None:
    sys.exit(cli())

"""Checkpoint container: JSON metadata header + named float32 blobs.

Layout: 8-byte magic, little-endian u64 header length, UTF-8 JSON header,
then raw blob bytes.  Parameter and optimizer-moment blobs are
little-endian float32; the header carries everything else (specs, loss
weights, counters, config hash, blob index).
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .errors import CheckpointError, SpecError

MAGIC = b"PFCKPT01"
FORMAT_VERSION = 1


def module_blobs(module: nn.Module, prefix: str) -> dict[str, np.ndarray]:
    return {
        f"{prefix}/{name}": p.detach().cpu().numpy().astype("<f4", copy=False)
        for name, p in module.state_dict().items()
    }


def apply_blobs(module: nn.Module, blobs: dict[str, np.ndarray], prefix: str) -> None:
    """Copy named blobs into a module; shape mismatches raise SpecError."""
    state = module.state_dict()
    diffs = []
    missing = []
    for name, tensor in state.items():
        key = f"{prefix}/{name}"
        if key not in blobs:
            missing.append(key)
            continue
        blob = blobs[key]
        if tuple(blob.shape) != tuple(tensor.shape):
            diffs.append(f"{key}: checkpoint {tuple(blob.shape)} vs network {tuple(tensor.shape)}")
    if diffs or missing:
        lines = diffs + [f"{k}: absent from checkpoint" for k in missing]
        raise SpecError("parameter shape mismatch:\n  " + "\n  ".join(lines))
    with torch.no_grad():
        for name, tensor in state.items():
            tensor.copy_(torch.from_numpy(blobs[f"{prefix}/{name}"].copy()))
    module.load_state_dict(state)


def optimizer_blobs(opt: torch.optim.Adam, module: nn.Module,
                    prefix: str) -> tuple[dict[str, np.ndarray], dict[str, float]]:
    """Moment blobs plus per-parameter step counters (header metadata)."""
    name_of = {id(p): n for n, p in module.named_parameters()}
    blobs: dict[str, np.ndarray] = {}
    steps: dict[str, float] = {}
    for group in opt.param_groups:
        for p in group["params"]:
            state = opt.state.get(p)
            if not state:
                continue
            pname = name_of[id(p)]
            blobs[f"{prefix}/{pname}/exp_avg"] = (
                state["exp_avg"].detach().cpu().numpy().astype("<f4", copy=False))
            blobs[f"{prefix}/{pname}/exp_avg_sq"] = (
                state["exp_avg_sq"].detach().cpu().numpy().astype("<f4", copy=False))
            steps[pname] = float(state["step"])
    return blobs, steps


def restore_optimizer(opt: torch.optim.Adam, module: nn.Module, prefix: str,
                      blobs: dict[str, np.ndarray], steps: dict[str, float]) -> None:
    for name, p in module.named_parameters():
        if name not in steps:
            continue
        opt.state[p] = {
            "step": torch.tensor(steps[name], dtype=torch.float32),
            "exp_avg": torch.from_numpy(blobs[f"{prefix}/{name}/exp_avg"].copy()),
            "exp_avg_sq": torch.from_numpy(blobs[f"{prefix}/{name}/exp_avg_sq"].copy()),
        }


def write_container(path: str | Path, metadata: dict, blobs: dict[str, np.ndarray]) -> None:
    index = []
    offset = 0
    payload = []
    for name in sorted(blobs):
        arr = np.ascontiguousarray(blobs[name], dtype="<f4")
        index.append({"name": name, "dtype": "<f4", "shape": list(arr.shape),
                      "offset": offset, "nbytes": arr.nbytes})
        payload.append(arr.tobytes())
        offset += arr.nbytes
    header = dict(metadata)
    header["format_version"] = FORMAT_VERSION
    header["blobs"] = index
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        for chunk in payload:
            fh.write(chunk)
    tmp.replace(path)


def read_container(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < len(MAGIC) + 8 or raw[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint (bad magic)")
    (header_len,) = struct.unpack("<Q", raw[len(MAGIC): len(MAGIC) + 8])
    start = len(MAGIC) + 8
    if start + header_len > len(raw):
        raise CheckpointError(f"{path} is truncated (header)")
    try:
        header = json.loads(raw[start: start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path} has a corrupt header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format_version {header.get('format_version')} unsupported "
            f"(expected {FORMAT_VERSION})")
    body = raw[start + header_len:]
    blobs: dict[str, np.ndarray] = {}
    for item in header["blobs"]:
        end = item["offset"] + item["nbytes"]
        if end > len(body):
            raise CheckpointError(f"{path} is truncated (blob {item['name']})")
        arr = np.frombuffer(body[item["offset"]: end], dtype=item["dtype"])
        blobs[item["name"]] = arr.reshape(item["shape"]).copy()
    return header, blobs


def spec_dict(spec) -> dict:
    return asdict(spec)

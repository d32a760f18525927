"""Inference throughput measurement."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..networks.generator import GeneratorSpec, build_generator
from .infer import InferenceModel

# throughput of the original Torch implementation on a GTX-1080-class GPU,
# printed as context next to our measurement
REFERENCE_FPS = 20.0
REFERENCE_SIZE = 128


@dataclass
class BenchmarkResult:
    image_size: int
    frames: int
    seconds: float
    fps: float

    def summary(self) -> str:
        lines = [
            f"inference throughput: {self.fps:.2f} frames/s "
            f"({self.frames} frames at {self.image_size}x{self.image_size} "
            f"in {self.seconds:.2f}s)",
            f"reference context: {REFERENCE_FPS:.0f} fps at "
            f"{REFERENCE_SIZE}x{REFERENCE_SIZE} (original implementation, "
            "GTX 1080-class GPU); informational only",
        ]
        return "\n".join(lines)


def run_benchmark(model: InferenceModel | None = None, image_size: int = 128,
                  frames: int = 20, warmup: int = 3, seed: int = 0) -> BenchmarkResult:
    """Time composited single-frame inference on synthetic inputs."""
    if model is None:
        model = InferenceModel(build_generator(GeneratorSpec(image_size=image_size), seed))
    size = model.image_size
    rng = np.random.default_rng(seed)
    masked = rng.uniform(-1, 1, size=(size, size, 3)).astype(np.float32)
    reference = rng.uniform(-1, 1, size=(size, size, 3)).astype(np.float32)
    pose_map = np.zeros((size, size, 3), dtype=np.float32)

    for _ in range(warmup):
        model.predict(masked, reference, pose_map)
    t0 = time.perf_counter()
    for _ in range(frames):
        model.predict(masked, reference, pose_map)
    dt = time.perf_counter() - t0
    return BenchmarkResult(image_size=size, frames=frames, seconds=dt,
                           fps=frames / dt if dt > 0 else float("inf"))

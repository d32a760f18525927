"""Inference pipelines: single images, videos, throughput, CLI."""

from .benchmark import BenchmarkResult, run_benchmark
from .cli import cli, main
from .infer import InferenceModel, composite, infer_single
from .video import PoseSource, VideoJob, infer_video

__all__ = [
    "BenchmarkResult",
    "run_benchmark",
    "cli",
    "main",
    "InferenceModel",
    "composite",
    "infer_single",
    "PoseSource",
    "VideoJob",
    "infer_video",
]

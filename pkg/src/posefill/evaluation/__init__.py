"""Metric oracles, identity verification, test-set evaluation, pose sweeps."""

from .evaluate import MetricReport, evaluate, write_report
from .metrics import psnr, ssim
from .pose_sweep import PoseSweepResult, pose_sweep, render_contact_sheet, save_contact_sheet
from .verification import (
    VerificationResult,
    calibrate_threshold,
    cosine_similarity,
    eer_threshold,
    verify_identity,
)

__all__ = [
    "MetricReport",
    "evaluate",
    "write_report",
    "psnr",
    "ssim",
    "PoseSweepResult",
    "pose_sweep",
    "render_contact_sheet",
    "save_contact_sheet",
    "VerificationResult",
    "calibrate_threshold",
    "cosine_similarity",
    "eer_threshold",
    "verify_identity",
]

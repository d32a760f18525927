"""Loss terms for the inpainting objective.

Four terms drive the generator: full-frame L1 reconstruction, identity
feature distance, and the two patch-adversarial terms (context and pose).
The pose term is routed through a gradient gate so it only supervises the
missing region.  All reductions are means, which keeps the configured
weights resolution-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch

from .errors import NumericsError, ShapeError

# probability clamp inside the cross-entropy, for numerical safety
BCE_EPS = 1e-7


@dataclass(frozen=True)
class LossWeights:
    """Composite-objective weights; a zero weight disables its term."""

    lambda_r: float = 1.0
    mu_id: float = 100.0
    alpha_global: float = 100.0
    gamma_pose: float = 70.0

    def validate(self) -> None:
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"loss weight {name} must be >= 0, got {value}")

    def for_variant(self, variant: str) -> "LossWeights":
        """Ablation variants force specific weights to zero."""
        if variant == "full":
            return self
        if variant == "l1_gan":
            return LossWeights(self.lambda_r, 0.0, self.alpha_global, 0.0)
        if variant == "l1_gan_id":
            return LossWeights(self.lambda_r, self.mu_id, self.alpha_global, 0.0)
        raise ValueError(f"unknown variant {variant!r}")


@dataclass
class LossReport:
    """Per-step loss values, one CSV row per training step."""

    l_r: float = 0.0
    l_id: float = 0.0
    l_adv_global_g: float = 0.0
    l_adv_pose_g: float = 0.0
    l_total_g: float = 0.0
    l_d_global: float = 0.0
    l_d_pose: float = 0.0

    CSV_HEADER = "step,l_r,l_id,l_adv_global_g,l_adv_pose_g,l_total_g,l_d_global,l_d_pose"

    def csv_row(self, step: int) -> str:
        return (f"{step},{self.l_r:.8g},{self.l_id:.8g},{self.l_adv_global_g:.8g},"
                f"{self.l_adv_pose_g:.8g},{self.l_total_g:.8g},{self.l_d_global:.8g},"
                f"{self.l_d_pose:.8g}")


def _as_tensor(x) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x
    return torch.as_tensor(np.asarray(x), dtype=torch.float32)


def reconstruction_loss(pred, target) -> torch.Tensor:
    """Mean absolute difference over all pixels and channels."""
    pred, target = _as_tensor(pred), _as_tensor(target)
    if pred.shape != target.shape:
        raise ShapeError(f"pred {tuple(pred.shape)} vs target {tuple(target.shape)}")
    return (pred - target).abs().mean()


def identity_loss(pred, reference, embedder) -> torch.Tensor:
    """Euclidean distance between identity features of pred and reference.

    Gradients flow to pred only; the reference branch is detached (it is
    data, not a learnable path).
    """
    pred, reference = _as_tensor(pred), _as_tensor(reference)
    if pred.dim() == 3:
        pred = pred.permute(2, 0, 1).unsqueeze(0)
        reference = reference.permute(2, 0, 1).unsqueeze(0)
    f_pred = embedder.features(pred)
    with torch.no_grad():
        f_ref = embedder.features(reference)
    return torch.linalg.vector_norm(f_pred - f_ref, dim=1).mean()


def _log_sigmoid_clamped(scores: torch.Tensor) -> torch.Tensor:
    return torch.clamp(torch.sigmoid(scores), BCE_EPS, 1.0 - BCE_EPS).log()


def _log_one_minus_sigmoid_clamped(scores: torch.Tensor) -> torch.Tensor:
    return torch.clamp(1.0 - torch.sigmoid(scores), BCE_EPS, 1.0 - BCE_EPS).log()


def adversarial_d_loss(disc, real, fake, condition) -> torch.Tensor:
    """Discriminator BCE averaged over the patch grid.

    -mean[log sigma(D(real, c))] - mean[log(1 - sigma(D(fake, c)))];
    fake is detached from the generator graph.
    """
    real_scores = disc(real, condition)
    fake_scores = disc(fake.detach(), condition)
    return -(_log_sigmoid_clamped(real_scores).mean()
             + _log_one_minus_sigmoid_clamped(fake_scores).mean())


def adversarial_g_loss(disc, fake, condition) -> torch.Tensor:
    """Non-saturating generator term: -mean[log sigma(D(fake, c))]."""
    return -_log_sigmoid_clamped(disc(fake, condition)).mean()


def gate_pose_gradient(gen_output: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Value-preserving gate: downstream gradients vanish outside the mask.

    Forward value equals gen_output exactly; backward multiplies the
    incoming gradient by the mask.
    """
    if mask.dim() == 2:
        mask = mask.unsqueeze(0).unsqueeze(0)
    if mask.shape[-2:] != gen_output.shape[-2:]:
        raise ShapeError(
            f"mask {tuple(mask.shape)} vs output {tuple(gen_output.shape)} spatial mismatch"
        )
    return mask * gen_output + (1.0 - mask) * gen_output.detach()


def total_generator_loss(l_r, l_id, l_adv_global, l_adv_pose,
                         weights: LossWeights):
    """Weighted sum of the four terms; zero-weight terms contribute exactly 0."""
    weights.validate()
    total = None
    for weight, term in ((weights.lambda_r, l_r), (weights.mu_id, l_id),
                         (weights.alpha_global, l_adv_global),
                         (weights.gamma_pose, l_adv_pose)):
        if weight == 0.0:
            continue
        value = float(term.detach()) if isinstance(term, torch.Tensor) else float(term)
        if not math.isfinite(value):
            raise NumericsError(f"non-finite loss term {value} (weight {weight})")
        contrib = weight * term
        total = contrib if total is None else total + contrib
    if total is None:
        return torch.zeros(())
    return total

"""Loss-term ablation: train and score the three objective variants."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

from ..datagen.manifest import DatasetManifest
from .config import ABLATION_ORDER, TrainConfig

log = logging.getLogger(__name__)


@dataclass
class AblationRow:
    variant: str
    psnr: float
    ssim: float
    verif_vs_groundtruth: float
    verif_vs_reference: float
    error: str = ""


@dataclass
class AblationReport:
    rows: list[AblationRow]

    def to_csv(self) -> str:
        lines = ["variant,psnr,ssim,verif_vs_groundtruth,verif_vs_reference,error"]
        for r in self.rows:
            lines.append(f"{r.variant},{r.psnr:.6g},{r.ssim:.6g},"
                         f"{r.verif_vs_groundtruth:.6g},{r.verif_vs_reference:.6g},{r.error}")
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        header = f"{'variant':<12} {'PSNR':>8} {'SSIM':>8} {'verif/gt':>9} {'verif/ref':>10}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            if r.error:
                lines.append(f"{r.variant:<12} failed: {r.error}")
            else:
                lines.append(f"{r.variant:<12} {r.psnr:>8.3f} {r.ssim:>8.4f} "
                             f"{r.verif_vs_groundtruth:>9.3f} {r.verif_vs_reference:>10.3f}")
        return "\n".join(lines)


def run_ablation(base_config: TrainConfig, manifest: DatasetManifest, embedder,
                 out_dir: str | Path) -> AblationReport:
    """Train l1_gan, l1_gan_id, and full with identical seeds and data
    order, then evaluate each on the test split.

    A variant that fails to train is reported with its error and does not
    abort the others.
    """
    from ..evaluation.evaluate import evaluate
    from ..evaluation.verification import calibrate_threshold
    from ..pipeline.infer import InferenceModel
    from .loop import train

    base_config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    threshold = calibrate_threshold(embedder, manifest, image_size=base_config.image_size)

    rows = []
    for variant in ABLATION_ORDER:
        config = dataclasses.replace(base_config, variant=variant)
        variant_dir = out_dir / variant
        try:
            ckpt = train(config, manifest, embedder=embedder, out_dir=variant_dir)
            model = InferenceModel.from_checkpoint(ckpt)
            report = evaluate(model.infer_sample, manifest, embedder,
                              threshold=threshold, image_size=config.image_size,
                              seed=config.seed)
            rows.append(AblationRow(variant=variant, psnr=report.psnr_mean,
                                    ssim=report.ssim_mean,
                                    verif_vs_groundtruth=report.verif_vs_groundtruth,
                                    verif_vs_reference=report.verif_vs_reference))
        except Exception as exc:  # noqa: BLE001 - variants are isolated by contract
            log.warning("variant %s failed: %s", variant, exc)
            rows.append(AblationRow(variant=variant, psnr=float("nan"), ssim=float("nan"),
                                    verif_vs_groundtruth=float("nan"),
                                    verif_vs_reference=float("nan"), error=str(exc)))

    report = AblationReport(rows=rows)
    (out_dir / "ablation.csv").write_text(report.to_csv())
    (out_dir / "ablation.txt").write_text(report.to_table() + "\n")
    return report

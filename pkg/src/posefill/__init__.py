"""posefill: identity-preserving, pose-conditioned face inpainting.

A conditional U-Net generator fills large ocular occlusions, guided by a
reference image of the target identity and a constant-channel pose map,
trained against per-patch context and pose discriminators plus a frozen
identity-embedding loss.
"""

from . import datagen, evaluation, losses, networks, pipeline, trainer
from .errors import PosefillError

__version__ = "0.1.0"

__all__ = ["datagen", "evaluation", "losses", "networks", "pipeline", "trainer",
           "PosefillError", "__version__"]

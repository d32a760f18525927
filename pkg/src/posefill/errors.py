"""Exception hierarchy shared across the package."""


class PosefillError(Exception):
    """Base class for all errors raised by this package."""


class AlignmentError(PosefillError):
    """Face alignment received landmarks it cannot register."""


class EncodingError(PosefillError):
    """A pose could not be encoded into a pose map."""


class MaskError(PosefillError):
    """An occlusion rectangle is degenerate or out of range."""


class PairingError(PosefillError):
    """No valid reference image exists for a training sample."""


class IoError(PosefillError):
    """Dataset files could not be written or read."""


class ShapeError(PosefillError):
    """Tensor or image shapes are inconsistent."""


class SpecError(PosefillError):
    """A network specification is invalid or mismatched."""


class NumericsError(PosefillError):
    """A loss or metric became non-finite."""


class CheckpointError(PosefillError):
    """A checkpoint file is corrupt or has an unsupported version."""


class TrainingError(PosefillError):
    """Training preconditions are not met."""


class CalibrationError(PosefillError):
    """Verification threshold calibration is impossible on this data."""


class SizeError(PosefillError):
    """An image is too small for the requested operation."""


class PoseSourceError(PosefillError):
    """A per-frame pose could not be resolved."""


class EvalError(PosefillError):
    """Too many evaluation samples failed."""


class ConfigError(PosefillError):
    """A config file contains unknown keys or unparsable values."""

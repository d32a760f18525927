"""Image quality metrics: PSNR and windowed SSIM.

Both operate on [-1, 1] images mapped to [0, 1].  The SSIM variant is
pinned: luma weights (0.299, 0.587, 0.114), 11x11 Gaussian window with
sigma 1.5, C1 = 0.01^2, C2 = 0.03^2, mean over valid window positions.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import convolve2d

from ..errors import ShapeError, SizeError
from ..imgio import to_unit

PSNR_CAP_DB = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """10*log10(1 / MSE) on the [0, 1] range, capped at 99 dB."""
    if a.shape != b.shape:
        raise ShapeError(f"psnr: shapes differ {a.shape} vs {b.shape}")
    diff = to_unit(a) - to_unit(b)
    mse = float(np.mean(diff * diff))
    if mse <= 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(1.0 / mse), PSNR_CAP_DB)


def to_gray_unit(img: np.ndarray) -> np.ndarray:
    u = to_unit(img)
    return (GRAY_WEIGHTS[0] * u[..., 0] + GRAY_WEIGHTS[1] * u[..., 1]
            + GRAY_WEIGHTS[2] * u[..., 2])


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size, dtype=np.float64) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity over valid 11x11 windows."""
    if a.shape != b.shape:
        raise ShapeError(f"ssim: shapes differ {a.shape} vs {b.shape}")
    if a.shape[0] < SSIM_WINDOW or a.shape[1] < SSIM_WINDOW:
        raise SizeError(f"ssim needs images >= {SSIM_WINDOW}px, got {a.shape[:2]}")
    x = to_gray_unit(a)
    y = to_gray_unit(b)
    w = gaussian_window()

    mu_x = convolve2d(x, w, mode="valid")
    mu_y = convolve2d(y, w, mode="valid")
    var_x = convolve2d(x * x, w, mode="valid") - mu_x * mu_x
    var_y = convolve2d(y * y, w, mode="valid") - mu_y * mu_y
    cov = convolve2d(x * y, w, mode="valid") - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_x**2 + mu_y**2 + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return float(np.mean(num / den))

"""Image quality (MSE, PSNR, SSIM) and message similarity (NC)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imagecore import MAXVAL, as_image

SSIM_SIGMA = 1.5
SSIM_RADIUS = 5  # 11x11 window
SSIM_C1 = (0.01 * MAXVAL) ** 2
SSIM_C2 = (0.03 * MAXVAL) ** 2


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_image(a), as_image(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a.pixels.astype(np.float64), b.pixels.astype(np.float64)


def mse(a, b) -> float:
    x, y = _pair(a, b)
    return float(np.mean((x - y) ** 2))


def psnr_from_mse(value: float) -> float:
    if value == 0:
        return math.inf
    return 10.0 * math.log10(MAXVAL**2 / value)


def psnr(a, b) -> float:
    """PSNR in dB against peak 255; ``inf`` for identical images."""
    return psnr_from_mse(mse(a, b))


def _gauss(x: np.ndarray) -> np.ndarray:
    return ndimage.gaussian_filter(x, SSIM_SIGMA, mode="reflect", truncate=SSIM_RADIUS / SSIM_SIGMA)


def ssim_map(a, b) -> np.ndarray:
    x, y = _pair(a, b)
    mx, my = _gauss(x), _gauss(y)
    sxx = _gauss(x * x) - mx * mx
    syy = _gauss(y * y) - my * my
    sxy = _gauss(x * y) - mx * my
    num = (2 * mx * my + SSIM_C1) * (2 * sxy + SSIM_C2)
    den = (mx * mx + my * my + SSIM_C1) * (sxx + syy + SSIM_C2)
    return num / den


def ssim(a, b) -> float:
    """Mean SSIM, Gaussian window (sigma 1.5, 11x11), borders excluded by the window radius."""
    m = ssim_map(a, b)
    r = SSIM_RADIUS
    if m.shape[0] > 2 * r and m.shape[1] > 2 * r:
        m = m[r:-r, r:-r]
    return float(m.mean())


def nc(original, extracted) -> float:
    """Normalized correlation of two {0,1} bit vectors."""
    w = np.asarray(original, dtype=np.float64).ravel()
    v = np.asarray(extracted, dtype=np.float64).ravel()
    if w.size != v.size:
        raise ValueError(f"message lengths differ: {w.size} vs {v.size}")
    ew, ev = float(w @ w), float(v @ v)
    if ew == 0 or ev == 0:
        return 1.0 if ew == ev == 0 else 0.0
    return float(w @ v) / math.sqrt(ew * ev)


def bit_error_rate(original, extracted) -> float:
    w = np.asarray(original).ravel()
    v = np.asarray(extracted).ravel()
    if w.size != v.size:
        raise ValueError(f"message lengths differ: {w.size} vs {v.size}")
    return float(np.mean(w != v)) if w.size else 0.0


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float
    ssim: float


def quality(a, b) -> QualityReport:
    m = mse(a, b)
    return QualityReport(mse=m, psnr=psnr_from_mse(m), ssim=ssim(a, b))


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"

"""Deterministic attacks: JPEG-style requantization, salt-and-pepper noise, median filter."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft, ndimage

from .imagecore import GrayImage, as_image

# ITU T.81 Annex K luminance table
LUMA_QUANT = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)

TILE = 8
DEFAULT_DENSITY = 0.01
DEFAULT_WINDOW = 3


def quant_table(q: int) -> np.ndarray:
    """IJG quality scaling of the luminance table; entries are clamped to >= 1."""
    if not 1 <= q <= 100:
        raise ValueError(f"JPEG quality must be in [1, 100], got {q}")
    scale = 5000 // q if q < 50 else 200 - 2 * q
    table = (LUMA_QUANT * scale + 50) // 100
    return np.maximum(table, 1)


def jpeg_attack(image, q: int) -> GrayImage:
    """Lossy 8x8 DCT requantization at quality ``q`` (entropy coding omitted)."""
    image = as_image(image)
    table = quant_table(q).astype(np.float64)
    h, w = image.shape
    ph, pw = -h % TILE, -w % TILE
    padded = np.pad(image.pixels.astype(np.float64), ((0, ph), (0, pw)), mode="edge") - 128.0
    H, W = padded.shape
    tiles = padded.reshape(H // TILE, TILE, W // TILE, TILE).swapaxes(1, 2)
    coeffs = fft.dctn(tiles, type=2, norm="ortho", axes=(2, 3))
    coeffs = np.round(coeffs / table) * table
    recon = fft.idctn(coeffs, type=2, norm="ortho", axes=(2, 3))
    out = recon.swapaxes(1, 2).reshape(H, W)[:h, :w] + 128.0
    return GrayImage(np.clip(np.round(out), 0, 255).astype(np.uint8))


def salt_pepper(image, density: float, seed: int) -> GrayImage:
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    image = as_image(image)
    rng = np.random.default_rng(seed)
    hit = rng.random(image.shape) < density
    salt = rng.random(image.shape) < 0.5
    out = image.copy_array()
    out[hit & salt] = 255
    out[hit & ~salt] = 0
    return GrayImage(out)


def median_filter(image, window: int = DEFAULT_WINDOW) -> GrayImage:
    if window < 3 or window % 2 == 0:
        raise ValueError(f"median window must be an odd integer >= 3, got {window}")
    image = as_image(image)
    return GrayImage(ndimage.median_filter(image.pixels, size=window, mode="nearest"))


@dataclass(frozen=True)
class AttackSpec:
    kind: str  # "jpeg", "saltpepper" or "median"
    quality: int = 0
    density: float = 0.0
    seed: int = 0
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.kind == "jpeg":
            quant_table(self.quality)
        elif self.kind == "saltpepper":
            if not 0.0 <= self.density <= 1.0:
                raise ValueError(f"density must be in [0, 1], got {self.density}")
        elif self.kind == "median":
            if self.window < 3 or self.window % 2 == 0:
                raise ValueError(f"median window must be an odd integer >= 3, got {self.window}")
        else:
            raise ValueError(f"unknown attack {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "AttackSpec":
        """Parse "jpeg:80", "saltpepper:0.01:42" or "median:3"."""
        parts = text.strip().lower().split(":")
        kind, args = parts[0], parts[1:]
        try:
            if kind == "jpeg" and len(args) == 1:
                return cls("jpeg", quality=int(args[0]))
            if kind in ("saltpepper", "sp") and 1 <= len(args) <= 2:
                seed = int(args[1]) if len(args) == 2 else 0
                return cls("saltpepper", density=float(args[0]), seed=seed)
            if kind == "median" and len(args) <= 1:
                return cls("median", window=int(args[0]) if args else DEFAULT_WINDOW)
        except ValueError as exc:
            raise ValueError(f"bad attack spec {text!r}: {exc}") from None
        raise ValueError(f"bad attack spec {text!r}; expected jpeg:Q, saltpepper:D[:SEED] or median:W")

    def __str__(self):
        if self.kind == "jpeg":
            return f"jpeg:{self.quality}"
        if self.kind == "saltpepper":
            return f"saltpepper:{self.density:g}:{self.seed}"
        return f"median:{self.window}"

    def apply(self, image) -> GrayImage:
        if self.kind == "jpeg":
            return jpeg_attack(image, self.quality)
        if self.kind == "saltpepper":
            return salt_pepper(image, self.density, self.seed)
        return median_filter(image, self.window)


def apply_chain(image, specs) -> GrayImage:
    out = as_image(image)
    for spec in specs:
        out = spec.apply(out)
    return out

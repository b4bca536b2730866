"""Block disorder analysis.

The MSB-sum analyzer drives embedding and extraction. The DCT, entropy and
Canny-edge scorers are only used to build comparison maps of equal size
(top-n_d selection).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import fft, ndimage

from .imagecore import BLOCK, BlockGrid, as_image, partition

DISORDERED_SUMS = frozenset({4, 5, 6})

CANNY_SIGMA = 1.4
CANNY_KERNEL = 5
CANNY_LOW = 0.10
CANNY_HIGH = 0.20


class BlockType(enum.Enum):
    ORDERED = "O"
    DISORDERED = "D"


@dataclass(frozen=True, eq=False)
class CongestionMap:
    """Per-block labels; ``disordered`` is a (blocks_y, blocks_x) bool array."""

    disordered: np.ndarray

    def __post_init__(self):
        arr = np.array(self.disordered, dtype=bool, copy=True)
        if arr.ndim != 2:
            raise ValueError("congestion map must be 2-D")
        arr.flags.writeable = False
        object.__setattr__(self, "disordered", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.disordered.shape

    @property
    def n_d(self) -> int:
        return int(self.disordered.sum())

    def __len__(self):
        return self.disordered.size

    def __getitem__(self, index: int) -> BlockType:
        return BlockType.DISORDERED if self.disordered.flat[index] else BlockType.ORDERED

    def __eq__(self, other):
        if not isinstance(other, CongestionMap):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.disordered, other.disordered))

    def to_text(self) -> str:
        return "\n".join("".join("D" if d else "O" for d in row) for row in self.disordered) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CongestionMap":
        rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("map rows must be non-empty and equal length")
        bad = set("".join(rows)) - {"O", "D"}
        if bad:
            raise ValueError(f"unexpected map symbols {sorted(bad)}")
        return cls(np.array([[c == "D" for c in r] for r in rows]))


def msb_sum(block) -> int:
    """Number of pixels with the MSB set among the 9 pixels of a block."""
    values = np.asarray(block).ravel()
    if values.size != BLOCK * BLOCK:
        raise ValueError(f"a block has 9 pixels, got {values.size}")
    return int(((values >> 7) & 1).sum())


def classify(s: int) -> BlockType:
    if not 0 <= s <= 9:
        raise ValueError(f"MSB sum must be in [0, 9], got {s}")
    return BlockType.DISORDERED if s in DISORDERED_SUMS else BlockType.ORDERED


def msb_sums(image) -> np.ndarray:
    """(blocks_y, blocks_x) array of MSB sums."""
    image = as_image(image)
    grid = partition(image)
    return (grid.blocks(image.pixels) >> 7).sum(axis=(2, 3)).astype(np.int64)


def analyze(image) -> CongestionMap:
    s = msb_sums(image)
    return CongestionMap((s >= 4) & (s <= 6))


# -- comparison scorers ------------------------------------------------------


def _float_blocks(image) -> tuple[BlockGrid, np.ndarray]:
    image = as_image(image)
    grid = partition(image)
    return grid, grid.blocks(image.pixels).astype(np.float64)


def dct_scores(image) -> np.ndarray:
    """MSE between each block and its DC-only DCT reconstruction."""
    grid, blocks = _float_blocks(image)
    coeffs = fft.dctn(blocks, type=2, norm="ortho", axes=(2, 3))
    dc_only = np.zeros_like(coeffs)
    dc_only[..., 0, 0] = coeffs[..., 0, 0]
    recon = fft.idctn(dc_only, type=2, norm="ortho", axes=(2, 3))
    return ((blocks - recon) ** 2).mean(axis=(2, 3))


def entropy_scores(image) -> np.ndarray:
    """Base-2 Shannon entropy of each block's intensity histogram."""
    image = as_image(image)
    grid = partition(image)
    flat = grid.flat_blocks(image.pixels)
    # multiplicity of each pixel's value inside its block
    counts = (flat[:, :, None] == flat[:, None, :]).sum(axis=2)
    p = counts / (BLOCK * BLOCK)
    h = -(np.log2(p) / (BLOCK * BLOCK)).sum(axis=1)
    h = np.where(np.isclose(h, 0.0), 0.0, h)
    return h.reshape(grid.shape)


def gaussian_kernel(size: int = CANNY_KERNEL, sigma: float = CANNY_SIGMA) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2
    g = np.exp(-(r**2) / (2 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)


def canny(pixels: np.ndarray, low: float = CANNY_LOW, high: float = CANNY_HIGH) -> np.ndarray:
    """Canny edge map (bool). Thresholds are fractions of the peak gradient magnitude."""
    img = np.asarray(pixels, dtype=np.float64)
    smooth = ndimage.convolve(img, gaussian_kernel(), mode="nearest")
    # correlate so gx > 0 where intensity increases to the right
    gx = ndimage.correlate(smooth, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(smooth, _SOBEL_X.T, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 1e-9:
        return np.zeros(img.shape, dtype=bool)

    # quantize gradient direction into 0, 45, 90, 135 degrees
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.round(angle / 45.0).astype(int)) % 4
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    padded = np.pad(mag, 1, mode="constant")
    h, w = mag.shape
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dy, dx) in offsets.items():
        fwd = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        bwd = padded[1 - dy : 1 - dy + h, 1 - dx : 1 - dx + w]
        keep |= (sector == s) & (mag >= fwd) & (mag >= bwd)
    thin = np.where(keep, mag, 0.0)

    strong = thin >= high * peak
    weak = thin >= low * peak
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return strong
    has_strong = np.zeros(n + 1, dtype=bool)
    has_strong[np.unique(labels[strong])] = True
    has_strong[0] = False
    return has_strong[labels]


def edge_scores(image) -> np.ndarray:
    """Number of Canny edge pixels inside each block (0..9)."""
    image = as_image(image)
    grid = partition(image)
    edges = canny(image.pixels)
    return grid.blocks(edges).sum(axis=(2, 3)).astype(np.int64)


def top_nd_map(scores, n_d: int, shape: tuple[int, int] | None = None) -> CongestionMap:
    """Mark the ``n_d`` highest-scoring blocks disordered; ties go to the lower block index."""
    arr = np.asarray(scores, dtype=np.float64)
    if shape is None:
        shape = arr.shape if arr.ndim == 2 else (1, arr.size)
    flat = arr.ravel()
    if not 0 <= n_d <= flat.size:
        raise ValueError(f"n_d must be in [0, {flat.size}], got {n_d}")
    order = np.argsort(-flat, kind="stable")
    mask = np.zeros(flat.size, dtype=bool)
    mask[order[:n_d]] = True
    return CongestionMap(mask.reshape(shape))


ANALYZERS = {
    "dct": dct_scores,
    "entropy": entropy_scores,
    "edge": edge_scores,
}


def comparison_maps(image) -> dict[str, CongestionMap]:
    """Proposed map plus equal-size top-n_d maps from the three comparison scorers."""
    proposed = analyze(image)
    maps = {name: top_nd_map(fn(image), proposed.n_d) for name, fn in ANALYZERS.items()}
    maps["proposed"] = proposed
    return maps

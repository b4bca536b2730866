"""Adaptive bit-plane embedding and blind voting extraction.

Every pixel of a 3x3 block carries the block's watermark bit. Ordered blocks
use plane 3, disordered blocks plane 5. The enhanced variant also writes the
complemented bit one plane lower, which lowers the expected squared change
from 2 * 4**i to 1.5 * 4**i when the target bit has weight 2**(i+1).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .congestion import CongestionMap, analyze
from .imagecore import BLOCK, GrayImage, as_image, load_image, partition, set_bit

ORDERED_PLANE = 3
DISORDERED_PLANE = 5
VOTE_THRESHOLD = 4


class MessageLengthError(ValueError):
    pass


@dataclass(frozen=True)
class EmbedMode:
    kind: str  # "fixed", "basic" or "enhanced"
    plane: int | None = None

    def __post_init__(self):
        if self.kind not in ("fixed", "basic", "enhanced"):
            raise ValueError(f"unknown embed mode {self.kind!r}")
        if self.kind == "fixed":
            if self.plane is None or not 1 <= self.plane <= 8:
                raise ValueError(f"fixed plane must be in [1, 7], got {self.plane}")
            if self.plane == 8:
                raise ValueError("plane 8 is reserved for the congestion classifier")
        elif self.plane is not None:
            raise ValueError("adaptive modes choose their plane per block")

    @classmethod
    def fixed(cls, plane: int) -> "EmbedMode":
        return cls("fixed", plane)

    @classmethod
    def parse(cls, text: str) -> "EmbedMode":
        text = text.strip().lower()
        if text in ("basic", "enhanced"):
            return cls(text)
        if text.startswith("plane") and text[5:].isdigit():
            return cls.fixed(int(text[5:]))
        raise ValueError(f"unknown mode {text!r}; use plane<k>, basic or enhanced")

    @property
    def label(self) -> str:
        return f"plane{self.plane}" if self.kind == "fixed" else self.kind

    @property
    def adaptive(self) -> bool:
        return self.kind != "fixed"


PLANE3 = EmbedMode.fixed(3)
PLANE5 = EmbedMode.fixed(5)
BASIC = EmbedMode("basic")
ENHANCED = EmbedMode("enhanced")
BENCH_MODES = (PLANE3, PLANE5, BASIC, ENHANCED)


# -- messages ----------------------------------------------------------------


def as_message(bits) -> np.ndarray:
    arr = np.asarray(bits).ravel()
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("message bits must be 0 or 1")
    return arr.astype(np.uint8)


def random_message(length: int, seed: int) -> np.ndarray:
    if length < 0:
        raise ValueError("length must be non-negative")
    return np.random.default_rng(seed).integers(0, 2, size=length, dtype=np.uint8)


def message_to_text(bits) -> str:
    return "".join("1" if b else "0" for b in as_message(bits)) + "\n"


def message_from_text(text: str) -> np.ndarray:
    body = "".join(text.split())
    bad = set(body) - {"0", "1"}
    if bad:
        raise ValueError(f"message file may only contain '0' and '1', found {sorted(bad)}")
    return np.frombuffer(body.encode("ascii"), dtype=np.uint8) - ord("0")


def message_from_logo(image) -> np.ndarray:
    """Binary logo: pixels >= 128 become 1, row-major."""
    return (as_image(image).pixels.ravel() >= 128).astype(np.uint8)


def read_message(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head in (b"P5", b"P2"):
        return message_from_logo(load_image(path))
    with open(path, encoding="ascii") as fh:
        return message_from_text(fh.read())


def write_message(bits, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(message_to_text(bits))


# -- embedding / extraction --------------------------------------------------


def block_planes(cmap: CongestionMap, mode: EmbedMode) -> np.ndarray:
    """Target plane of every block, (blocks_y, blocks_x)."""
    if mode.kind == "fixed":
        return np.full(cmap.shape, mode.plane, dtype=np.uint8)
    return np.where(cmap.disordered, DISORDERED_PLANE, ORDERED_PLANE).astype(np.uint8)


def _resolve_map(image: GrayImage, cmap: CongestionMap | None) -> CongestionMap:
    grid = partition(image)
    if cmap is None:
        return analyze(image)
    if cmap.shape != grid.shape:
        raise ValueError(f"congestion map shape {cmap.shape} does not match block grid {grid.shape}")
    return cmap


def embed(image, message, mode: EmbedMode = BASIC, cmap: CongestionMap | None = None) -> GrayImage:
    """Write one message bit per block (row-major) into all 9 pixels of the block.

    ``cmap`` overrides the MSB analysis; it exists for the analyzer comparison
    and must then be handed to :func:`extract` as well.
    """
    image = as_image(image)
    grid = partition(image)
    bits = as_message(message)
    if bits.size != grid.count:
        raise MessageLengthError(f"message has {bits.size} bits but the image has {grid.count} blocks")
    cmap = _resolve_map(image, cmap)

    planes = grid.expand(block_planes(cmap, mode))
    w = grid.expand(bits.reshape(grid.shape))
    out = image.copy_array()
    core = out[: BLOCK * grid.blocks_y, : BLOCK * grid.blocks_x]

    shift = planes - 1
    core &= ~(np.uint8(1) << shift)
    core |= w << shift
    if mode.kind == "enhanced":
        low = shift - 1
        core &= ~(np.uint8(1) << low)
        core |= (w ^ 1) << low
    return GrayImage(out)


def block_votes(image, mode: EmbedMode = BASIC, cmap: CongestionMap | None = None) -> np.ndarray:
    """Count of 1s on the target plane in every block, flattened in block order."""
    image = as_image(image)
    grid = partition(image)
    cmap = _resolve_map(image, cmap)
    planes = grid.expand(block_planes(cmap, mode)).astype(np.uint8)
    core = image.pixels[: BLOCK * grid.blocks_y, : BLOCK * grid.blocks_x]
    plane_bits = (core >> (planes - 1)) & 1
    return grid.blocks(plane_bits).sum(axis=(2, 3)).ravel()


def extract(image, mode: EmbedMode = BASIC, cmap: CongestionMap | None = None) -> np.ndarray:
    """Blind extraction: re-run the MSB analysis, then majority-vote each block.

    Basic and enhanced embeddings are read identically.
    """
    return (block_votes(image, mode, cmap) > VOTE_THRESHOLD).astype(np.uint8)


# -- distortion model --------------------------------------------------------


@dataclass(frozen=True)
class DistortionCase:
    i: int
    mode: str
    case: int
    magnitude: int


def _check_i(i: int) -> None:
    if not 0 <= i <= 6:
        raise ValueError(f"i must be in [0, 6], got {i}")


def expected_sq_distortion(i: int, mode: str) -> float:
    """Expected squared pixel change when the target bit has weight 2**(i+1) (plane i+2)."""
    return float(expected_sq_distortion_exact(i, mode))


def expected_sq_distortion_exact(i: int, mode: str) -> Fraction:
    _check_i(i)
    if mode == "basic":
        return Fraction(2) * 4**i
    if mode == "enhanced":
        return Fraction(3, 2) * 4**i
    raise ValueError(f"mode must be 'basic' or 'enhanced', got {mode!r}")


def replace_bits(pixel: int, i: int, w: int, mode: str) -> int:
    """Write ``w`` into plane i+2; enhanced mode also writes ``1 - w`` into plane i+1."""
    _check_i(i)
    out = set_bit(pixel, i + 2, w)
    if mode == "enhanced":
        out = set_bit(out, i + 1, 1 - w)
    return out


def distortion_case(b_hi: int, b_lo: int, w: int, i: int, mode: str) -> DistortionCase:
    """Case id and |D| from the case tables, cross-checked by direct bit replacement."""
    _check_i(i)
    for name, bit in (("b_hi", b_hi), ("b_lo", b_lo), ("w", w)):
        if bit not in (0, 1):
            raise ValueError(f"{name} must be 0 or 1")
    if mode == "basic":
        case, mag = (1, 0) if b_hi == w else (2, 2 ** (i + 1))
    elif mode == "enhanced":
        if b_hi == b_lo:
            case, mag = (1, 2**i) if b_hi == w else (4, 2 ** (i + 1))
        else:
            case, mag = (2, 0) if b_hi == w else (3, 2 ** (i + 1) - 2**i)
    else:
        raise ValueError(f"mode must be 'basic' or 'enhanced', got {mode!r}")

    pixel = (b_hi << (i + 1)) | (b_lo << i)
    direct = abs(replace_bits(pixel, i, w, mode) - pixel)
    if direct != mag:
        raise AssertionError(f"case table disagrees with bit replacement: {mag} != {direct}")
    return DistortionCase(i, mode, case, mag)


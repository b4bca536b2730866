"""Grayscale image container, PGM I/O, 3x3 block grid and bit-plane helpers."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

BLOCK = 3
MAXVAL = 255


class PgmError(ValueError):
    """Base class for PGM parse failures."""


class PgmHeaderError(PgmError):
    pass


class PgmMaxvalError(PgmError):
    pass


class PgmTruncatedError(PgmError):
    pass


class NoBlocksError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image. ``pixels`` is a read-only (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > MAXVAL):
                raise ValueError("intensities must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
                raise ValueError("intensities must be integers")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash((self.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"

    @classmethod
    def from_values(cls, width: int, height: int, values) -> "GrayImage":
        """Build from a flat row-major sequence."""
        flat = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if flat.size != width * height:
            raise ValueError(f"expected {width * height} pixels, got {flat.size}")
        return cls(flat.reshape(height, width))

    def flat(self) -> list[int]:
        return self.pixels.ravel().tolist()

    def copy_array(self) -> np.ndarray:
        """Writable copy of the pixel data."""
        return self.pixels.copy()


def as_image(obj) -> GrayImage:
    return obj if isinstance(obj, GrayImage) else GrayImage(obj)


# -- PGM ---------------------------------------------------------------------

_WS = b" \t\n\r\x0b\x0c"


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated tokens, skipping '#' comments.

    Returns the tokens and the offset just past the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos >= n:
            raise PgmHeaderError("unexpected end of header")
        if data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _parse_int(tok: bytes, what: str) -> int:
    if not tok.isdigit():
        raise PgmHeaderError(f"bad {what}: {tok!r}")
    return int(tok)


def decode_pgm(data: bytes) -> GrayImage:
    if data[:2] not in (b"P5", b"P2"):
        raise PgmHeaderError("not a PGM file (magic must be P5 or P2)")
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P2"):
        raise PgmHeaderError(f"bad magic {magic!r}")
    width = _parse_int(tokens[1], "width")
    height = _parse_int(tokens[2], "height")
    maxval = _parse_int(tokens[3], "maxval")
    if width == 0 or height == 0:
        raise PgmHeaderError("zero image dimension")
    if maxval != MAXVAL:
        raise PgmMaxvalError(f"unsupported maxval {maxval}")
    count = width * height

    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WS:
            raise PgmTruncatedError("missing raster")
        payload = data[pos + 1 : pos + 1 + count]
        if len(payload) < count:
            raise PgmTruncatedError(f"expected {count} bytes of raster, got {len(payload)}")
        arr = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = data[pos:]
        # strip comments from the ascii raster
        lines = [ln.split(b"#", 1)[0] for ln in body.splitlines()]
        fields = b" ".join(lines).split()
        if len(fields) < count:
            raise PgmTruncatedError(f"expected {count} samples, got {len(fields)}")
        try:
            vals = [int(f) for f in fields[:count]]
        except ValueError as exc:
            raise PgmHeaderError(f"non-numeric sample in ascii raster: {exc}") from None
        if any(v > MAXVAL for v in vals):
            raise PgmError("sample exceeds maxval")
        arr = np.array(vals, dtype=np.uint8)
    return GrayImage(arr.reshape(height, width))


def encode_pgm(image: GrayImage) -> bytes:
    image = as_image(image)
    header = f"P5\n{image.width} {image.height}\n{MAXVAL}\n".encode("ascii")
    return header + image.pixels.tobytes()


def load_image(path: str | os.PathLike) -> GrayImage:
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def store_image(image: GrayImage, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(image))


# -- blocks ------------------------------------------------------------------


@dataclass(frozen=True)
class BlockGrid:
    """Non-overlapping 3x3 blocks in row-major order; the partial margin is excluded."""

    blocks_x: int
    blocks_y: int
    width: int
    height: int

    @property
    def count(self) -> int:
        return self.blocks_x * self.blocks_y

    @property
    def shape(self) -> tuple[int, int]:
        return self.blocks_y, self.blocks_x

    def block_index(self, bx: int, by: int) -> int:
        return by * self.blocks_x + bx

    def block_coords(self, index: int) -> tuple[int, int]:
        by, bx = divmod(index, self.blocks_x)
        return bx, by

    def pixel_slice(self, bx: int, by: int) -> tuple[slice, slice]:
        return slice(BLOCK * by, BLOCK * by + BLOCK), slice(BLOCK * bx, BLOCK * bx + BLOCK)

    def blocks(self, pixels: np.ndarray) -> np.ndarray:
        """View of the covered region as (blocks_y, blocks_x, 3, 3)."""
        core = pixels[: BLOCK * self.blocks_y, : BLOCK * self.blocks_x]
        return core.reshape(self.blocks_y, BLOCK, self.blocks_x, BLOCK).swapaxes(1, 2)

    def flat_blocks(self, pixels: np.ndarray) -> np.ndarray:
        """(count, 9) array, rows in block order, pixels within a block row-major."""
        return self.blocks(pixels).reshape(self.count, BLOCK * BLOCK)

    def expand(self, per_block: np.ndarray) -> np.ndarray:
        """Broadcast a (blocks_y, blocks_x) array to pixel resolution of the covered region."""
        return np.repeat(np.repeat(per_block, BLOCK, axis=0), BLOCK, axis=1)


def partition(image) -> BlockGrid:
    image = as_image(image)
    if image.width < BLOCK or image.height < BLOCK:
        raise NoBlocksError(f"no blocks: image {image.width}x{image.height} is smaller than 3x3")
    return BlockGrid(image.width // BLOCK, image.height // BLOCK, image.width, image.height)


# -- bit planes --------------------------------------------------------------


def _check_plane(plane: int) -> None:
    if not 1 <= plane <= 8:
        raise ValueError(f"bit-plane must be in [1, 8], got {plane}")


def get_bit(pixel, plane: int):
    """Bit of weight 2**(plane-1). Works on ints and integer arrays."""
    _check_plane(plane)
    return (pixel >> (plane - 1)) & 1


def set_bit(pixel, plane: int, value):
    _check_plane(plane)
    mask = 1 << (plane - 1)
    if isinstance(pixel, np.ndarray):
        value = np.asarray(value, dtype=pixel.dtype)
        return (pixel & np.asarray(~mask & 0xFF, dtype=pixel.dtype)) | (value << (plane - 1)).astype(pixel.dtype)
    if value not in (0, 1):
        raise ValueError(f"bit value must be 0 or 1, got {value}")
    return (pixel & ~mask & 0xFF) | (value << (plane - 1))

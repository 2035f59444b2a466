"""Binary PGM (P5) reading and writing, and the in-memory sample grid."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadHeader, BadMagic, OutOfRange, Truncated

__all__ = ["SampleGrid", "read_pgm", "write_pgm", "load_pgm", "save_pgm"]

_WHITESPACE = b" \t\r\n\v\f"


@dataclass(eq=False)
class SampleGrid:
    """A 2-D grid of signed integer samples.

    ``samples`` is a ``(height, width)`` int64 array in row-major order. The
    same type holds raw images and transformed (signed) coefficient planes.
    """

    width: int
    height: int
    bit_depth: int
    samples: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise BadHeader(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if not 1 <= self.bit_depth <= 16:
            raise BadHeader(f"bit depth must be in 1..16, got {self.bit_depth}")
        self.samples = np.asarray(self.samples, dtype=np.int64)
        if self.samples.shape != (self.height, self.width):
            raise BadHeader(
                f"sample array has shape {self.samples.shape}, expected {(self.height, self.width)}"
            )

    @classmethod
    def from_array(cls, array, bit_depth: int | None = None) -> "SampleGrid":
        array = np.asarray(array, dtype=np.int64)
        if array.ndim != 2:
            raise BadHeader("sample array must be two-dimensional")
        if bit_depth is None:
            peak = int(array.max()) if array.size else 0
            bit_depth = max(1, peak.bit_length())
        return cls(array.shape[1], array.shape[0], bit_depth, array.copy())

    @property
    def pixels(self) -> int:
        return self.width * self.height

    @property
    def maxval(self) -> int:
        return (1 << self.bit_depth) - 1

    def copy(self) -> "SampleGrid":
        return SampleGrid(self.width, self.height, self.bit_depth, self.samples.copy())

    def in_range(self) -> bool:
        return bool(self.samples.min() >= 0 and self.samples.max() <= self.maxval)

    def __eq__(self, other):
        if not isinstance(other, SampleGrid):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.bit_depth == other.bit_depth
            and np.array_equal(self.samples, other.samples)
        )

    def __repr__(self):
        return f"SampleGrid({self.width}x{self.height}, {self.bit_depth} bit)"


def _header_tokens(data: bytes, count: int):
    """Yield ``count`` header tokens and the offset just past the last one."""
    pos = 0
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise Truncated("PGM header ended early")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(data: bytes) -> SampleGrid:
    """Parse a binary PGM byte string into a :class:`SampleGrid`."""
    data = bytes(data)
    if data[:2] != b"P5":
        raise BadMagic(f"expected P5 magic, got {data[:2]!r}")
    tokens, pos = _header_tokens(data[2:], 3)
    pos += 2
    try:
        width, height, maxval = (int(tok) for tok in tokens)
    except ValueError as exc:
        raise BadHeader(f"non-numeric PGM header field: {exc}") from None
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise BadHeader(f"bad PGM header: {width}x{height}, maxval {maxval}")
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise Truncated("missing whitespace after PGM maxval")
    pos += 1

    bytes_per_sample = 2 if maxval > 255 else 1
    need = width * height * bytes_per_sample
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise Truncated(f"PGM raster has {len(payload)} bytes, expected {need}")
    dtype = ">u2" if bytes_per_sample == 2 else "u1"
    samples = np.frombuffer(payload, dtype=dtype).astype(np.int64).reshape(height, width)
    bit_depth = max(1, maxval.bit_length())
    return SampleGrid(width, height, bit_depth, samples)


def write_pgm(grid: SampleGrid) -> bytes:
    if not grid.in_range():
        raise OutOfRange(f"samples outside [0, {grid.maxval}] cannot be written as PGM")
    maxval = grid.maxval
    header = f"P5\n{grid.width} {grid.height}\n{maxval}\n".encode("ascii")
    dtype = ">u2" if maxval > 255 else "u1"
    return header + grid.samples.astype(dtype).tobytes()


def load_pgm(path) -> SampleGrid:
    return read_pgm(Path(path).read_bytes())


def save_pgm(grid: SampleGrid, path) -> None:
    Path(path).write_bytes(write_pgm(grid))

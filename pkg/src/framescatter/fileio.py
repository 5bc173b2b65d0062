"""Raw signal files and 8-bit PGM import.

Raw layout: a 16-byte little-endian header ``b"FSCT", version:u16, d:u16,
n:u32, reserved:u32`` followed by ``n**d`` complex samples stored as
``(re, im)`` float64 pairs in row-major order. Spectra use the same layout
in FFT frequency order.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .signal import Grid, Signal, Spectrum

MAGIC = b"FSCT"
VERSION = 1
_HEADER = struct.Struct("<4sHHII")


def _write_raw(path, grid: Grid, values: np.ndarray) -> None:
    header = _HEADER.pack(MAGIC, VERSION, grid.d, grid.n, 0)
    payload = np.ascontiguousarray(values, dtype="<c16").tobytes()
    Path(path).write_bytes(header + payload)


def _read_raw(path) -> tuple[Grid, np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigurationError(f"{path}: truncated header")
    magic, version, d, n, _ = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ConfigurationError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ConfigurationError(f"{path}: unsupported version {version}")
    grid = Grid(d, n)
    expected = _HEADER.size + 16 * n ** d
    if len(data) != expected:
        raise ConfigurationError(f"{path}: expected {expected} bytes, found {len(data)}")
    values = np.frombuffer(data, dtype="<c16", offset=_HEADER.size).reshape(grid.shape)
    return grid, values.astype(complex)


def write_signal(path, f: Signal) -> None:
    _write_raw(path, f.grid, f.values)


def read_signal(path) -> Signal:
    grid, values = _read_raw(path)
    return Signal(grid, values)


def write_spectrum(path, s: Spectrum) -> None:
    _write_raw(path, s.grid, s.values)


def read_spectrum(path) -> Spectrum:
    grid, values = _read_raw(path)
    return Spectrum(grid, values)


def _pgm_tokens(data: bytes):
    """Yield header tokens of a PGM file, skipping comments, with byte offsets."""
    pos = 0
    while True:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        yield data[start:pos], pos


def read_pgm(path) -> Signal:
    """Load an 8-bit grayscale PGM (P5 or P2) as a real signal in ``[0, 1]``.

    The image must be square with a power-of-two side length.
    """
    data = Path(path).read_bytes()
    tokens = _pgm_tokens(data)
    magic, _ = next(tokens)
    if magic not in (b"P5", b"P2"):
        raise ConfigurationError(f"{path}: not a PGM file (magic {magic!r})")
    width = int(next(tokens)[0])
    height = int(next(tokens)[0])
    maxval_tok, end = next(tokens)
    maxval = int(maxval_tok)
    if not 0 < maxval < 256:
        raise ConfigurationError(f"{path}: only 8-bit PGM is supported (maxval {maxval})")
    if width != height:
        raise ConfigurationError(f"{path}: image must be square, got {width}x{height}")
    if magic == b"P5":
        if len(data) < end + 1 + width * height:
            raise ConfigurationError(f"{path}: truncated pixel data")
        pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=end + 1)
    else:
        pixels = np.array(data[end:].split()[: width * height], dtype=np.int64)
        if pixels.size != width * height:
            raise ConfigurationError(f"{path}: truncated pixel data")
    grid = Grid(2, width)
    return Signal(grid, pixels.reshape(height, width).astype(float) / maxval)

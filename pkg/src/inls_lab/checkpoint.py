"""Binary field snapshots: bit-exact, language-neutral.

Layout (all little-endian):

    bytes 0..3    magic "INLS"
    u32           format version (currently 1)
    u32           n  (grid points per axis)
    f64           L  (box side length)
    f64           b  (weight decay exponent)
    f64           t  (simulation time)
    n^3 * c16     field values, interleaved (re, im) f64, z index fastest

A version-1 file stays readable by every later reader; readers dispatch on
the version word.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import ComplexField, make_grid

__all__ = [
    "CheckpointError",
    "FORMAT_VERSION",
    "MAGIC",
    "read_checkpoint",
    "write_checkpoint",
]

MAGIC = b"INLS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIddd")


class CheckpointError(IOError):
    pass


def write_checkpoint(u: ComplexField, t: float, b: float, path) -> Path:
    path = Path(path)
    g = u.grid
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, g.n, g.length, b, t)
    payload = np.ascontiguousarray(u.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))
    return path


def _read_v1(fh, n: int, length: float, b: float, t: float):
    expected = n * n * n * 16
    payload = fh.read(expected + 1)
    if len(payload) < expected:
        raise CheckpointError(
            f"truncated checkpoint: expected {expected} payload bytes, got {len(payload)}"
        )
    if len(payload) > expected:
        raise CheckpointError("trailing bytes after checkpoint payload")
    values = np.frombuffer(payload, dtype="<c16").reshape(n, n, n)
    grid = make_grid(n, length)
    return ComplexField(values.astype(np.complex128, copy=True), grid), t, b


_READERS = {1: _read_v1}


def read_checkpoint(path):
    """Returns (field, t, b); raises CheckpointError on any malformation
    without returning a partial field."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise CheckpointError("truncated checkpoint: header incomplete")
        magic, version, n, length, b, t = _HEADER.unpack(head)
        if magic != MAGIC:
            raise CheckpointError(f"bad magic {magic!r}, expected {MAGIC!r}")
        reader = _READERS.get(version)
        if reader is None:
            raise CheckpointError(
                f"unsupported checkpoint version {version} "
                f"(this reader knows versions {sorted(_READERS)})"
            )
        if n <= 0 or length <= 0:
            raise CheckpointError(f"corrupt header: n={n}, L={length}")
        return reader(fh, n, length, b, t)

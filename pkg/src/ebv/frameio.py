"""Binary frame file format.

Fixed little-endian layout::

    offset  size  field
    0       8     magic  b"EBVFRAME"
    8       2     version (uint16, currently 1)
    10      4     dim    (uint32)
    14      4     num    (uint32)
    18      8     alpha  (float64)
    26      8     seed   (uint64)
    34      ...   payload: num x dim float64, row-major

Loading then saving reproduces the byte stream exactly.  The loader
re-checks row norms and refuses payloads outside 1 +/- 1e-6.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .core import FrameMatrix
from .errors import FrameFileError, FrameIntegrityError

MAGIC = b"EBVFRAME"
VERSION = 1
_HEADER = struct.Struct("<8sHIIdQ")
HEADER_SIZE = _HEADER.size  # 34
_LOAD_NORM_ATOL = 1e-6


@dataclass(frozen=True)
class FrameMeta:
    """Generation metadata carried alongside the payload."""

    alpha: float
    seed: int


def save_frame(frame: FrameMatrix, meta: FrameMeta, path) -> None:
    """Write the frame and fsync before returning."""
    frame.validate()
    payload = np.ascontiguousarray(frame.rows, dtype="<f8").tobytes()
    header = _HEADER.pack(
        MAGIC, VERSION, frame.dim, frame.num, meta.alpha, meta.seed
    )
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
    except OSError as exc:
        raise FrameFileError(f"cannot write frame file {path}: {exc}") from exc


def load_frame(path):
    """Read and validate a frame file; returns ``(FrameMatrix, FrameMeta)``."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise FrameFileError(f"cannot read frame file {path}: {exc}") from exc
    if len(blob) < HEADER_SIZE:
        raise FrameFileError(
            f"{path}: truncated header ({len(blob)} bytes, need {HEADER_SIZE})"
        )
    magic, version, dim, num, alpha, seed = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FrameFileError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FrameFileError(f"{path}: unsupported version {version}")
    expected = num * dim * 8
    actual = len(blob) - HEADER_SIZE
    if actual != expected:
        raise FrameFileError(
            f"{path}: payload is {actual} bytes, expected {expected} "
            f"for a {num} x {dim} float64 matrix"
        )
    rows = np.frombuffer(blob, dtype="<f8", offset=HEADER_SIZE).reshape(num, dim)
    rows = np.ascontiguousarray(rows)
    norms = np.linalg.norm(rows, axis=1)
    bad = np.abs(norms - 1.0) > _LOAD_NORM_ATOL
    if bad.any():
        worst = int(np.argmax(np.abs(norms - 1.0)))
        raise FrameIntegrityError(
            f"{path}: row {worst} has norm {norms[worst]:.9f}, "
            f"outside 1 +/- {_LOAD_NORM_ATOL:g}"
        )
    return FrameMatrix(dim=dim, num=num, rows=rows), FrameMeta(alpha=alpha, seed=seed)

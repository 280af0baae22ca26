"""Writers for the matrix wire formats the scoring core consumes.

FVEC1: bytes 0-4 magic "FVEC1", little-endian u32 n and u32 d, then n*d
little-endian float32 values row-major. CSV: one row per sample, optional
header. These are re-implemented here on purpose; the file format is the
interface between the two packages.
"""

from __future__ import annotations

import csv
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

FVEC1_MAGIC = b"FVEC1"
_HEADER = struct.Struct("<II")


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_fvec1(path, matrix: np.ndarray) -> None:
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    blob = FVEC1_MAGIC + _HEADER.pack(m.shape[0], m.shape[1]) + m.tobytes()
    _atomic_write(Path(path), blob)


def write_csv(path, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    for row in m:
        writer.writerow([repr(float(v)) for v in row])
    _atomic_write(Path(path), buf.getvalue().encode("utf-8"))

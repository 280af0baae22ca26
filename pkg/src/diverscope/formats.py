"""Matrix file formats shared by the feature and probability loaders.

FVEC1 binary layout: bytes 0-4 are the magic "FVEC1", followed by
little-endian u32 row count n and u32 column count d, followed by n*d
little-endian IEEE-754 32-bit floats in row-major order.

The CSV alternative is one row per sample with an optional header line.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

FVEC1_MAGIC = b"FVEC1"
_HEADER = struct.Struct("<II")


def write_fvec1(path, matrix) -> None:
    m = np.ascontiguousarray(matrix, dtype=np.float32)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    with open(path, "wb") as fh:
        fh.write(FVEC1_MAGIC)
        fh.write(_HEADER.pack(m.shape[0], m.shape[1]))
        fh.write(m.astype("<f4").tobytes())


def read_fvec1(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(FVEC1_MAGIC) + _HEADER.size:
        raise ValueError(f"{path}: truncated header ({len(blob)} bytes)")
    magic = blob[: len(FVEC1_MAGIC)]
    if magic != FVEC1_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, expected {FVEC1_MAGIC!r}")
    n, d = _HEADER.unpack_from(blob, len(FVEC1_MAGIC))
    payload = blob[len(FVEC1_MAGIC) + _HEADER.size:]
    expected = n * d * 4
    if len(payload) != expected:
        raise ValueError(
            f"{path}: expected {expected} payload bytes for {n}x{d}, "
            f"got {len(payload)}")
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    return values.reshape(n, d)


def write_csv_matrix(path, matrix, header: list[str] | None = None) -> None:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for row in m:
            writer.writerow([repr(float(v)) for v in row])


def read_csv_matrix(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except (csv.Error, UnicodeDecodeError) as exc:
        raise ValueError(f"{path}: not a matrix file (bad magic and not CSV): "
                         f"{exc}") from exc
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    start = 0
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        start = 1  # header line
    if start == len(rows):
        raise ValueError(f"{path}: CSV has a header but no data rows")
    width = len(rows[start])
    data = np.empty((len(rows) - start, width), dtype=np.float64)
    for i, row in enumerate(rows[start:]):
        if len(row) != width:
            raise ValueError(
                f"{path}: row {i} has {len(row)} columns, expected {width}")
        try:
            data[i] = [float(v) for v in row]
        except ValueError as exc:
            raise ValueError(f"{path}: row {i}: {exc}") from exc
    return data


def read_matrix(path) -> np.ndarray:
    """Read a matrix from an FVEC1 or CSV file, sniffing by magic bytes."""
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"no such file: {path}")
    with open(path, "rb") as fh:
        head = fh.read(len(FVEC1_MAGIC))
    if head == FVEC1_MAGIC:
        return read_fvec1(path)
    return read_csv_matrix(path)

"""Input validation helpers shared across the library.

These mirror the role of scikit-learn's ``check_array``: normalize whatever
the caller hands in to a well-defined ndarray, or fail with a message that
names the violated constraint.
"""

from __future__ import annotations

import numpy as np


def round_half_up(x):
    """Round half away from zero for non-negative values (floor(x + 0.5))."""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def check_gray_image(img) -> np.ndarray:
    """Validate and return an 8-bit grayscale image as a 2-D uint8 array.

    Integer inputs within [0, 255] are accepted and cast; anything else
    (floats, out-of-range values, wrong rank) raises ValueError.
    """
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image has a zero dimension")
    if arr.dtype == np.uint8:
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"expected integer intensities, got dtype {arr.dtype}")
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("intensities outside [0, 255]")
    return arr.astype(np.uint8)


def check_image_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Validate two grayscale images that must share dimensions."""
    a = check_gray_image(x)
    b = check_gray_image(y)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def check_feature_matrix(values, min_rows: int = 1) -> np.ndarray:
    """Validate an (n, d) real feature matrix; entries must be finite."""
    f = np.asarray(values, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {f.shape}")
    n, d = f.shape
    if n < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {n}")
    if d < 1:
        raise ValueError("feature dimension must be >= 1")
    if not np.isfinite(f).all():
        bad = int(np.argwhere(~np.isfinite(f).all(axis=1))[0, 0])
        raise ValueError(f"non-finite entry in row {bad}")
    return f


def check_prob_matrix(rows, tol: float = 1e-6) -> np.ndarray:
    """Validate an (n, k) matrix of per-sample class probabilities.

    Every entry must lie in [0, 1] and every row must sum to 1 within
    ``tol``; violations raise ValueError naming the offending row.
    """
    p = np.asarray(rows, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"expected a 2-D probability matrix, got shape {p.shape}")
    if p.shape[0] < 1 or p.shape[1] < 1:
        raise ValueError("probability matrix must be non-empty")
    if not np.isfinite(p).all():
        bad = int(np.argwhere(~np.isfinite(p).all(axis=1))[0, 0])
        raise ValueError(f"non-finite entry in row {bad}")
    in_range = (p >= 0.0) & (p <= 1.0)
    if not in_range.all():
        bad = int(np.argwhere(~in_range.all(axis=1))[0, 0])
        raise ValueError(f"row {bad} has an entry outside [0, 1]")
    sums = p.sum(axis=1)
    off = np.abs(sums - 1.0) > tol
    if off.any():
        bad = int(np.argmax(off))
        raise ValueError(f"row {bad} sums to {sums[bad]:.6f}, expected 1 within {tol}")
    return p


def check_finite_scalar(value, name: str) -> float:
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return v

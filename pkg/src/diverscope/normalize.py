"""Adaptive input-image normalization: per-window contrast-limited histogram
equalization with bilinear stitching of the window mappings.

The image is partitioned into a ``grid_n`` x ``grid_n`` grid of
non-overlapping windows. Each window's histogram is clipped at a limit
derived from the contrast threshold, turned into an equalization lookup
table, and every output pixel blends the four nearest window tables
bilinearly (or, in ``per-tile-hard`` mode, applies its own window's table
directly).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from diverscope.image import Dataset, save_image
from diverscope.validation import check_gray_image, round_half_up

INTERPOLATION_MODES = ("bilinear-stitch", "per-tile-hard")


@dataclass(frozen=True)
class AiinConfig:
    """Normalization parameters.

    grid_n: windows per axis (any >= 1; 4, 8, and 16 are the usual grid).
    contrast_threshold: non-negative clip threshold; 0 disables clipping.
    interpolation: "bilinear-stitch" blends neighboring window tables,
        "per-tile-hard" applies each window's table without blending.
    """

    grid_n: int = 8
    contrast_threshold: float = 10.0
    interpolation: str = "bilinear-stitch"

    def __post_init__(self):
        if self.grid_n < 1:
            raise ValueError(f"grid_n must be >= 1, got {self.grid_n}")
        if self.contrast_threshold < 0:
            raise ValueError(
                f"contrast_threshold must be >= 0, got {self.contrast_threshold}")
        if self.interpolation not in INTERPOLATION_MODES:
            raise ValueError(
                f"interpolation must be one of {INTERPOLATION_MODES}, "
                f"got {self.interpolation!r}")


def clip_histogram(hist, threshold: float, tile_area: int) -> np.ndarray:
    """Clip a 256-bin histogram and redistribute the excess uniformly.

    The per-bin limit is max(1, floor(threshold * tile_area / 256)). A
    threshold of 0 disables clipping entirely. Excess counts are spread
    one integer share per bin, with the remainder placed one count per bin
    starting from bin 0. The total count is conserved exactly.
    """
    h = np.asarray(hist, dtype=np.int64)
    if h.shape != (256,):
        raise ValueError(f"expected 256 histogram bins, got shape {h.shape}")
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    total = int(h.sum())
    if total != tile_area:
        raise ValueError(f"histogram sums to {total}, expected tile_area {tile_area}")
    if threshold == 0:
        return h.copy()
    limit = max(1, math.floor(threshold * tile_area / 256.0))
    clipped = np.minimum(h, limit)
    excess = tile_area - int(clipped.sum())
    clipped += excess // 256
    clipped[: excess % 256] += 1
    return clipped


def tile_lut(hist, tile_area: int) -> np.ndarray:
    """Build the equalization lookup table for one window's histogram.

    lut[v] = round((cdf(v) - cdf_min) / (tile_area - cdf_min) * 255) with
    cdf_min the smallest nonzero cdf value. A degenerate histogram (all
    counts in one bin) yields the identity mapping. The table is monotone
    non-decreasing with values in [0, 255].
    """
    h = np.asarray(hist, dtype=np.int64)
    if h.shape != (256,):
        raise ValueError(f"expected 256 histogram bins, got shape {h.shape}")
    if tile_area <= 0:
        raise ValueError(f"tile_area must be > 0, got {tile_area}")
    if int(h.sum()) != tile_area:
        raise ValueError(f"histogram sums to {int(h.sum())}, expected {tile_area}")
    cdf = np.cumsum(h)
    cdf_min = int(cdf[np.nonzero(h)[0][0]])
    if cdf_min == tile_area:
        return np.arange(256, dtype=np.uint8)
    lut = round_half_up((cdf - cdf_min) / float(tile_area - cdf_min) * 255.0)
    return np.clip(lut, 0, 255).astype(np.uint8)


def _tile_edges(length: int, n: int) -> np.ndarray:
    # The last tile absorbs the remainder when length is not divisible by n.
    base = length // n
    edges = np.arange(n + 1, dtype=np.int64) * base
    edges[n] = length
    return edges


def _tile_tables(img: np.ndarray, cfg: AiinConfig,
                 ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    n = cfg.grid_n
    luts = np.empty((n, n, 256), dtype=np.float64)
    identity = np.arange(256, dtype=np.float64)
    for r in range(n):
        for c in range(n):
            tile = img[ys[r]:ys[r + 1], xs[c]:xs[c + 1]]
            area = tile.size
            hist = np.bincount(tile.ravel(), minlength=256).astype(np.int64)
            if int(hist.max()) == area:
                # Single-intensity window: equalization is undefined, keep
                # the identity so constant regions pass through unchanged.
                luts[r, c] = identity
            else:
                clipped = clip_histogram(hist, cfg.contrast_threshold, area)
                luts[r, c] = tile_lut(clipped, area)
    return luts


def _blend_coords(idx: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Lower tile index and fractional weight toward the next tile center;
    # positions beyond the outermost centers clamp to weight 0 or 1.
    n = len(centers)
    if n == 1:
        return np.zeros(len(idx), dtype=np.int64), np.zeros(len(idx))
    lo = np.clip(np.searchsorted(centers, idx, side="right") - 1, 0, n - 2)
    t = (idx - centers[lo]) / (centers[lo + 1] - centers[lo])
    return lo, np.clip(t, 0.0, 1.0)


def aiin_normalize(img, cfg: AiinConfig | None = None) -> np.ndarray:
    """Normalize one grayscale image. Output dimensions equal the input's.

    Raises:
        ValueError: if either image dimension is smaller than the grid.
    """
    cfg = cfg or AiinConfig()
    arr = check_gray_image(img)
    h, w = arr.shape
    n = cfg.grid_n
    if h < n or w < n:
        raise ValueError(f"image {w}x{h} is smaller than a {n}x{n} window grid")

    ys = _tile_edges(h, n)
    xs = _tile_edges(w, n)
    luts = _tile_tables(arr, cfg, ys, xs)

    if cfg.interpolation == "per-tile-hard":
        row_tile = np.minimum(np.arange(h) // (h // n), n - 1)
        col_tile = np.minimum(np.arange(w) // (w // n), n - 1)
        mapped = luts[row_tile[:, None], col_tile[None, :], arr]
        return mapped.astype(np.uint8)

    cy = (ys[:-1] + ys[1:] - 1) / 2.0
    cx = (xs[:-1] + xs[1:] - 1) / 2.0
    r0, ty = _blend_coords(np.arange(h, dtype=np.float64), cy)
    c0, tx = _blend_coords(np.arange(w, dtype=np.float64), cx)
    r1 = np.minimum(r0 + 1, n - 1)
    c1 = np.minimum(c0 + 1, n - 1)

    wy = ty[:, None]
    wx = tx[None, :]
    blended = (
        (1.0 - wy) * (1.0 - wx) * luts[r0[:, None], c0[None, :], arr]
        + (1.0 - wy) * wx * luts[r0[:, None], c1[None, :], arr]
        + wy * (1.0 - wx) * luts[r1[:, None], c0[None, :], arr]
        + wy * wx * luts[r1[:, None], c1[None, :], arr]
    )
    return np.clip(round_half_up(blended), 0, 255).astype(np.uint8)


def normalize_dataset(ds: Dataset, cfg: AiinConfig, out_dir) -> Dataset:
    """Normalize every image in a dataset and write PNGs to ``out_dir``.

    Filenames are preserved (non-PNG sources keep their stem with a .png
    suffix). On a write failure the partial outputs are removed and the
    error re-raised.
    """
    if len(ds) == 0:
        raise ValueError("cannot normalize an empty dataset")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written: list[Path] = []
    out_paths: list[Path] = []
    out_images: list[np.ndarray] = []
    try:
        for i, (path, img) in enumerate(ds):
            name = path.name if path.suffix.lower() == ".png" else path.stem + ".png"
            target = out_dir / name
            if target in written:
                raise ValueError(f"output name collision on {name}")
            normalized = aiin_normalize(img, cfg)
            save_image(normalized, target)
            written.append(target)
            out_paths.append(target)
            out_images.append(normalized)
            if (i + 1) % 100 == 0:
                print(f"diverscope: normalized {i + 1}/{len(ds)}", file=sys.stderr)
    except Exception:
        for p in written:
            try:
                p.unlink()
            except OSError:
                pass
        raise
    return Dataset(label=ds.label, paths=out_paths, images=np.stack(out_images))


class AiinNormalizer(BaseEstimator, TransformerMixin):
    """Scikit-learn style transformer applying adaptive normalization.

    ``X`` is a (n, h, w) uint8 stack or an iterable of 2-D uint8 images;
    ``transform`` returns the normalized stack. The transformer is
    stateless, ``fit`` only validates parameters.
    """

    def __init__(self, grid_n: int = 8, contrast_threshold: float = 10.0,
                 interpolation: str = "bilinear-stitch"):
        self.grid_n = grid_n
        self.contrast_threshold = contrast_threshold
        self.interpolation = interpolation

    def _config(self) -> AiinConfig:
        return AiinConfig(grid_n=self.grid_n,
                          contrast_threshold=self.contrast_threshold,
                          interpolation=self.interpolation)

    def fit(self, X=None, y=None):
        self._config()
        return self

    def transform(self, X) -> np.ndarray:
        cfg = self._config()
        images = [aiin_normalize(img, cfg) for img in X]
        if not images:
            raise ValueError("cannot transform an empty image stack")
        return np.stack(images)

"""Multi-scale structural similarity for 8-bit grayscale images.

At each scale a Gaussian-weighted comparison yields luminance
l = (2 mx my + C1) / (mx^2 + my^2 + C1), contrast
c = (2 sx sy + C2) / (sx^2 + sy^2 + C2), and structure
s = (sxy + C3) / (sx sy + C3), averaged over valid window positions.
Scales are produced by 2x2 box averaging and decimation; the combined
score is the luminance of the coarsest scale and the contrast-structure
products of every scale, each raised to its (renormalized) scale weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import convolve2d

from diverscope.image import Dataset
from diverscope.validation import check_image_pair

DEFAULT_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


@dataclass(frozen=True)
class MsSsimParams:
    """Scale weights, Gaussian window, and stabilizer constants."""

    max_scales: int = 5
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    window_size: int = 11
    window_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 255.0

    def __post_init__(self):
        if self.max_scales < 1:
            raise ValueError("max_scales must be >= 1")
        if len(self.weights) < self.max_scales:
            raise ValueError("need one weight per scale")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be strictly positive")
        if self.window_size % 2 != 1:
            raise ValueError("window side must be odd")

    @property
    def c1(self) -> float:
        return (self.k1 * self.data_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.data_range) ** 2

    @property
    def c3(self) -> float:
        return self.c2 / 2.0


class ScaleComponents(NamedTuple):
    luminance: float
    contrast: float
    structure: float


@dataclass(frozen=True)
class PairSamplingSpec:
    """How many random image pairs to draw, and with what seed."""

    n_pairs: int = 670
    seed: int = 0

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")


@dataclass
class PairScores:
    """Dataset-level result: mean score plus the sampled pairs."""

    mean: float
    pairs: np.ndarray   # (n_pairs, 2) image indices
    scores: np.ndarray  # (n_pairs,)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("index_a,index_b,score\n")
            for (a, b), s in zip(self.pairs, self.scores):
                fh.write(f"{a},{b},{s:.9f}\n")


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    coords = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _filter_valid(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    # Separable Gaussian, valid region only (no padding).
    rows = convolve2d(a, g[None, :], mode="valid")
    return convolve2d(rows, g[:, None], mode="valid")


def _components(x: np.ndarray, y: np.ndarray, params: MsSsimParams) -> ScaleComponents:
    g = _gaussian_window(params.window_size, params.window_sigma)
    mu_x = _filter_valid(x, g)
    mu_y = _filter_valid(y, g)
    var_x = np.maximum(_filter_valid(x * x, g) - mu_x * mu_x, 0.0)
    var_y = np.maximum(_filter_valid(y * y, g) - mu_y * mu_y, 0.0)
    cov = _filter_valid(x * y, g) - mu_x * mu_y
    sig_x = np.sqrt(var_x)
    sig_y = np.sqrt(var_y)

    lum = (2.0 * mu_x * mu_y + params.c1) / (mu_x ** 2 + mu_y ** 2 + params.c1)
    con = (2.0 * sig_x * sig_y + params.c2) / (var_x + var_y + params.c2)
    stru = (cov + params.c3) / (sig_x * sig_y + params.c3)
    return ScaleComponents(float(lum.mean()), float(con.mean()), float(stru.mean()))


def _downsample2(a: np.ndarray) -> np.ndarray:
    # 2x2 box average then decimate; odd trailing row/column is dropped.
    h, w = a.shape
    a = a[: h - h % 2, : w - w % 2]
    return (a[0::2, 0::2] + a[0::2, 1::2] + a[1::2, 0::2] + a[1::2, 1::2]) / 4.0


def ssim_scale(x, y, params: MsSsimParams | None = None) -> ScaleComponents:
    """Single-scale components (mean luminance, contrast, structure)."""
    params = params or MsSsimParams()
    a, b = check_image_pair(x, y)
    if min(a.shape) < params.window_size:
        raise ValueError(
            f"image {a.shape[1]}x{a.shape[0]} is smaller than the "
            f"{params.window_size}-pixel window")
    return _components(a.astype(np.float64), b.astype(np.float64), params)


def msssim(x, y, params: MsSsimParams | None = None) -> float:
    """Multi-scale structural similarity of two same-sized images.

    Scales too small to fit the window are dropped and the weights are
    renormalized over the scales actually used; negative
    contrast-structure products are clamped to 0 before exponentiation,
    so the result lies in [0, 1] with msssim(x, x) == 1.
    """
    params = params or MsSsimParams()
    a, b = check_image_pair(x, y)
    if min(a.shape) < params.window_size:
        raise ValueError(
            f"image {a.shape[1]}x{a.shape[0]} is smaller than the "
            f"{params.window_size}-pixel window")

    fx = a.astype(np.float64)
    fy = b.astype(np.float64)
    comps: list[ScaleComponents] = []
    while True:
        comps.append(_components(fx, fy, params))
        if len(comps) == params.max_scales:
            break
        nh, nw = fx.shape[0] // 2, fx.shape[1] // 2
        if min(nh, nw) < params.window_size:
            break
        fx = _downsample2(fx)
        fy = _downsample2(fy)

    w = np.asarray(params.weights[: len(comps)], dtype=np.float64)
    w = w / w.sum()
    value = comps[-1].luminance ** w[-1]
    for j, comp in enumerate(comps):
        value *= max(comp.contrast * comp.structure, 0.0) ** w[j]
    return float(value)


def effective_scales(height: int, width: int, params: MsSsimParams | None = None) -> int:
    """Number of pyramid scales actually used for the given dimensions."""
    params = params or MsSsimParams()
    if min(height, width) < params.window_size:
        raise ValueError("image smaller than the comparison window")
    m, h, w = 1, height, width
    while m < params.max_scales and min(h // 2, w // 2) >= params.window_size:
        m, h, w = m + 1, h // 2, w // 2
    return m


def sample_pairs(n_images: int, spec: PairSamplingSpec) -> np.ndarray:
    """Draw (i, j) index pairs uniformly with i != j, deterministically."""
    if n_images < 2:
        raise ValueError(f"need at least 2 images, got {n_images}")
    rng = np.random.default_rng(spec.seed)
    i = rng.integers(0, n_images, size=spec.n_pairs)
    j = rng.integers(0, n_images - 1, size=spec.n_pairs)
    j = j + (j >= i)
    return np.column_stack([i, j])


def dataset_msssim(ds: Dataset, spec: PairSamplingSpec | None = None,
                   params: MsSsimParams | None = None) -> PairScores:
    """Mean similarity over seeded random image pairs from one dataset.

    The pair list is drawn up front from the seed and scores accumulate
    in pair order, so the result is identical for a given (dataset, seed)
    regardless of how the evaluation is scheduled.
    """
    spec = spec or PairSamplingSpec()
    params = params or MsSsimParams()
    pairs = sample_pairs(len(ds), spec)
    scores = np.array(
        [msssim(ds.images[a], ds.images[b], params) for a, b in pairs],
        dtype=np.float64,
    )
    return PairScores(mean=float(scores.mean()), pairs=pairs, scores=scores)

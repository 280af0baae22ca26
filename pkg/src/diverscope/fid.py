"""Fréchet distance between Gaussians fitted to feature activations.

score = ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 sqrtm(Sa Sb)), with the cross
term evaluated as sqrtm(sqrt(Sa) Sb sqrt(Sa)) so eigensolving stays on
symmetric PSD matrices. Lower is better; identical inputs score 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from diverscope.formats import read_matrix
from diverscope.validation import check_feature_matrix, check_gray_image

SYMMETRY_TOL = 1e-8
EIGENVALUE_FLOOR = -1e-8


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and symmetric covariance of a fitted feature set."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def fit_gaussian(features) -> GaussianStats:
    """Column means and unbiased (n-1) sample covariance, symmetrized."""
    f = check_feature_matrix(features, min_rows=2)
    mean = f.mean(axis=0)
    cov = np.cov(f, rowvar=False)
    cov = np.atleast_2d(cov)
    cov = (cov + cov.T) / 2.0
    return GaussianStats(mean=mean, cov=cov)


def matrix_sqrt_psd(mat) -> np.ndarray:
    """Square root of a symmetric PSD matrix via eigendecomposition.

    Eigenvalues in [-1e-8, 0) are treated as rounding noise and clamped
    to 0; anything more negative, or asymmetry beyond 1e-8, is an error.
    """
    m = np.asarray(mat, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.abs(m - m.T).max())
    if asym > SYMMETRY_TOL:
        raise ValueError(f"matrix asymmetry {asym:.3e} exceeds {SYMMETRY_TOL}")
    sym = (m + m.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    if float(eigvals.min()) < EIGENVALUE_FLOOR:
        raise ValueError(
            f"matrix is not PSD: min eigenvalue {float(eigvals.min()):.3e}")
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """Distance between two fitted Gaussians.

    Tiny negative results are rounding noise (around -1e-8, larger for
    rank-deficient covariances) and are clamped to 0; corrupt inputs are
    caught earlier by the PSD check in ``matrix_sqrt_psd``.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    sqrt_a = matrix_sqrt_psd(a.cov)
    inner = sqrt_a @ b.cov @ sqrt_a
    inner = (inner + inner.T) / 2.0
    cross = matrix_sqrt_psd(inner)
    value = float(diff @ diff) + float(
        np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.trace(cross))
    return max(value, 0.0)


def fid_score(real, synth) -> float:
    """Fit Gaussians to both feature sets and return their distance."""
    r = check_feature_matrix(real, min_rows=2)
    s = check_feature_matrix(synth, min_rows=2)
    if r.shape[1] != s.shape[1]:
        raise ValueError(
            f"feature dimension mismatch: real d={r.shape[1]}, "
            f"synthetic d={s.shape[1]}")
    return frechet_distance(fit_gaussian(r), fit_gaussian(s))


def pixel_features(img, grid: int = 8) -> np.ndarray:
    """Self-contained feature source: box-average an image down to
    ``grid`` x ``grid``, flatten, and scale intensities to [0, 1]."""
    arr = check_gray_image(img).astype(np.float64)
    h, w = arr.shape
    ys = np.floor(np.arange(grid + 1) * h / grid).astype(np.int64)
    xs = np.floor(np.arange(grid + 1) * w / grid).astype(np.int64)
    out = np.empty((grid, grid), dtype=np.float64)
    for r in range(grid):
        for c in range(grid):
            out[r, c] = arr[ys[r]:ys[r + 1], xs[c]:xs[c + 1]].mean()
    return out.ravel() / 255.0


def dataset_features(images) -> np.ndarray:
    """Stack pixel features for an iterable of images into an (n, 64) matrix."""
    return np.stack([pixel_features(img) for img in images])


def load_features(path) -> np.ndarray:
    """Read a feature matrix from an FVEC1 or CSV file (finite entries only)."""
    return check_feature_matrix(read_matrix(path))


class FrechetDistance(BaseEstimator):
    """Estimator wrapper: fit a Gaussian to reference features once, then
    measure the distance of other feature sets against it."""

    def fit(self, X, y=None):
        self.stats_ = fit_gaussian(X)
        return self

    def distance(self, X) -> float:
        if not hasattr(self, "stats_"):
            raise ValueError("FrechetDistance must be fitted before scoring")
        return frechet_distance(self.stats_, fit_gaussian(X))

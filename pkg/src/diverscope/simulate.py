"""Deterministic multi-mode image generator for metric sensitivity checks.

Each mode is a seeded low-frequency template (a sum of three 2-D cosines
quantized to [0, 255]); image i is template (i mod k) plus seeded uniform
pixel noise. Because the mode count is an explicit parameter, the
generator serves as ground truth for how diversity metrics should move
as collapse worsens.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from diverscope.image import Dataset
from diverscope.validation import round_half_up

_TEMPLATE_STREAM = 0
_NOISE_STREAM = 1


@dataclass(frozen=True)
class SimSpec:
    """Generator parameters; identical specs produce identical datasets."""

    k_modes: int
    n_images: int
    side: int = 128
    noise_amp: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.k_modes < 1:
            raise ValueError(f"k_modes must be >= 1, got {self.k_modes}")
        if self.n_images < self.k_modes:
            raise ValueError(
                f"n_images ({self.n_images}) must be >= k_modes ({self.k_modes})")
        if self.side < 1:
            raise ValueError(f"side must be >= 1, got {self.side}")
        if not 0 <= self.noise_amp <= 64:
            raise ValueError(f"noise_amp must be in [0, 64], got {self.noise_amp}")


def _stream(spec: SimSpec, kind: int, index: int) -> np.random.Generator:
    # Substream per (kind, index) so images are independent of n_images.
    return np.random.default_rng(
        np.random.SeedSequence(entropy=spec.seed, spawn_key=(kind, index)))


def _template(spec: SimSpec, t: int) -> np.ndarray:
    rng = _stream(spec, _TEMPLATE_STREAM, t)
    yy, xx = np.meshgrid(np.arange(spec.side), np.arange(spec.side), indexing="ij")
    raw = np.zeros((spec.side, spec.side), dtype=np.float64)
    for _ in range(3):
        fx = int(rng.integers(1, 5))
        fy = int(rng.integers(1, 5))
        phase = float(rng.uniform(0.0, 2.0 * np.pi))
        raw += np.cos(2.0 * np.pi * (fx * xx + fy * yy) / spec.side + phase)
    quantized = round_half_up((raw + 3.0) / 6.0 * 255.0)
    return np.clip(quantized, 0, 255).astype(np.uint8)


def templates(spec: SimSpec) -> np.ndarray:
    """The (k, side, side) mode templates for a spec."""
    return np.stack([_template(spec, t) for t in range(spec.k_modes)])


def generate_modes(spec: SimSpec) -> Dataset:
    """Generate the dataset: image i = template(i mod k) + uniform noise
    in [-noise_amp, +noise_amp], clamped to [0, 255]."""
    base = templates(spec)
    images = np.empty((spec.n_images, spec.side, spec.side), dtype=np.uint8)
    for i in range(spec.n_images):
        img = base[i % spec.k_modes].astype(np.int64)
        if spec.noise_amp > 0:
            rng = _stream(spec, _NOISE_STREAM, i)
            img = img + rng.integers(-spec.noise_amp, spec.noise_amp + 1,
                                     size=img.shape)
        images[i] = np.clip(img, 0, 255).astype(np.uint8)
    paths = [Path(f"sim_{i:05d}.png") for i in range(spec.n_images)]
    return Dataset(label=f"sim-k{spec.k_modes}", paths=paths, images=images)


def oracle_probs(ds: Dataset, spec: SimSpec) -> np.ndarray:
    """Stand-in classifier output for a generated dataset.

    Row i is the softmax over negative mean-squared distances from image
    i to each template, at temperature 1/255^2 (sharp: zero-noise rows
    are one-hot on their own template).
    """
    if len(ds) != spec.n_images:
        raise ValueError(
            f"dataset size {len(ds)} does not match spec n_images {spec.n_images}")
    if ds.images.shape[1:] != (spec.side, spec.side):
        raise ValueError(
            f"dataset images are {ds.images.shape[1:]}, spec side is {spec.side}")
    tmpl = templates(spec).astype(np.float64)
    flat = ds.images.reshape(len(ds), -1).astype(np.float64)
    msd = np.empty((len(ds), spec.k_modes), dtype=np.float64)
    for t in range(spec.k_modes):
        diff = flat - tmpl[t].ravel()
        msd[:, t] = (diff * diff).mean(axis=1)
    logits = -msd / (1.0 / 255.0 ** 2)
    logits -= logits.max(axis=1, keepdims=True)
    p = np.exp(logits)
    return p / p.sum(axis=1, keepdims=True)

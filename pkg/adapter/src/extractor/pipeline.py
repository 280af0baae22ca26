"""Directory-to-matrix extraction: deterministic ordering, batched
inference, and atomic export with a provenance sidecar."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from extractor.formats import _atomic_write, write_csv, write_fvec1
from extractor.models import (
    LOGITS_WIDTH,
    build_model,
    forward_pool_and_logits,
    pool_width,
)

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg"}

# ImageNet channel statistics applied after scaling intensities to [0, 1].
_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


@dataclass(frozen=True)
class ExtractorConfig:
    model: str = "inception_v3"
    weights: str = "auto"
    mode: str = "features"          # features | probs
    layer: str = "pool"             # pool | logits (features mode)
    size: int = 299
    batch_size: int = 8
    fmt: str = "fvec1"              # fvec1 | csv
    lenient: bool = False

    def __post_init__(self):
        pool_width(self.model)  # rejects unknown model names
        if self.mode not in ("features", "probs"):
            raise ValueError(f"mode must be features or probs, got {self.mode!r}")
        if self.layer not in ("pool", "logits"):
            raise ValueError(f"layer must be pool or logits, got {self.layer!r}")
        if self.fmt not in ("fvec1", "csv"):
            raise ValueError(f"format must be fvec1 or csv, got {self.fmt!r}")
        if self.size < 32:
            raise ValueError(f"input size too small: {self.size}")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")

    @property
    def output_width(self) -> int:
        if self.mode == "probs" or self.layer == "logits":
            return LOGITS_WIDTH
        return pool_width(self.model)


def list_images(directory) -> list[Path]:
    """Candidate image files in lexicographic filename order (the same
    ordering contract the scoring core applies when it loads a dataset)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"no such image directory: {directory}")
    return sorted(
        (p for p in directory.iterdir()
         if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS),
        key=lambda p: p.name,
    )


def preprocess(path: Path, size: int) -> np.ndarray:
    """Grayscale, bilinear-resize to size x size, replicate to 3 channels,
    scale to [0, 1], normalize with ImageNet statistics; (3, size, size)."""
    with Image.open(path) as im:
        gray = im.convert("L").resize((size, size), Image.BILINEAR)
    plane = np.asarray(gray, dtype=np.float32) / 255.0
    stacked = np.stack([plane, plane, plane])
    return (stacked - _MEAN[:, None, None]) / _STD[:, None, None]


def extract(directory, out_path, config: ExtractorConfig | None = None
            ) -> dict:
    """Run the classifier over a directory and write the matrix + sidecar.

    Returns a summary dict: rows written, skipped files, output width.
    Undecodable images are skipped with a diagnostic; the caller decides
    (via config.lenient) whether skips fail the run.
    """
    config = config or ExtractorConfig()
    out_path = Path(out_path)
    candidates = list_images(directory)
    if not candidates:
        raise ValueError(f"no image files in {directory}")

    model, provenance = build_model(config.model, config.weights)

    rows: list[np.ndarray] = []
    kept: list[str] = []
    skipped: list[str] = []
    batch_paths: list[Path] = []

    def flush():
        if not batch_paths:
            return
        arr = np.stack([preprocess(p, config.size) for p in batch_paths])
        feats, logits = forward_pool_and_logits(model, torch.from_numpy(arr))
        if config.mode == "probs":
            # float64 softmax, renormalized, so float32 rows still sum to 1
            # within the core's 1e-6 validation
            z = logits.numpy().astype(np.float64)
            z -= z.max(axis=1, keepdims=True)
            e = np.exp(z)
            out = e / e.sum(axis=1, keepdims=True)
        elif config.layer == "logits":
            out = logits.numpy().astype(np.float64)
        else:
            out = feats.numpy().astype(np.float64)
        rows.extend(np.asarray(r) for r in out)
        kept.extend(p.name for p in batch_paths)
        batch_paths.clear()

    for path in candidates:
        try:
            with Image.open(path) as im:
                im.load()
        except (UnidentifiedImageError, OSError) as exc:
            print(f"extractor: skipping {path}: {exc}", file=sys.stderr)
            skipped.append(path.name)
            continue
        batch_paths.append(path)
        if len(batch_paths) == config.batch_size:
            flush()
    flush()

    if not rows:
        raise ValueError(f"no decodable images in {directory}")
    matrix = np.stack(rows).astype(np.float32)

    if config.fmt == "csv":
        write_csv(out_path, matrix)
    else:
        write_fvec1(out_path, matrix)

    sidecar = {
        "model": config.model,
        "mode": config.mode,
        "layer": "softmax" if config.mode == "probs" else config.layer,
        "width": int(matrix.shape[1]),
        "rows": int(matrix.shape[0]),
        "format": config.fmt,
        "preprocessing": {
            "grayscale": True,
            "resize": [config.size, config.size],
            "filter": "bilinear",
            "channels": "replicate-3",
            "normalize": {"mean": _MEAN.tolist(), "std": _STD.tolist()},
        },
        "images": kept,
        "skipped": skipped,
        **provenance,
    }
    _atomic_write(out_path.with_suffix(out_path.suffix + ".meta.json"),
                  (json.dumps(sidecar, indent=2) + "\n").encode("utf-8"))
    return {
        "rows": int(matrix.shape[0]),
        "width": int(matrix.shape[1]),
        "skipped": len(skipped),
        "out": str(out_path),
    }

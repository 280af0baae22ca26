"""Parameter sweep: score real/synthetic dataset pairs over the window and
threshold grid and emit machine-readable reports.

Each grid row scores normalized copies (same window/threshold applied to
both datasets); baseline rows score the raw images. Class-spread scores
require externally supplied probability files and are left empty when
none are configured, since the toolkit hosts no classifier.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from diverscope.collapse import detect_inter_collapse, detect_intra_collapse
from diverscope.fid import dataset_features, fid_score
from diverscope.image import Dataset, load_dataset
from diverscope.inception import inception_score, load_probs
from diverscope.msssim import PairSamplingSpec, dataset_msssim
from diverscope.normalize import AiinConfig, aiin_normalize

DEFAULT_WINDOW_SIZES = (4, 8, 16)
DEFAULT_THRESHOLDS = (0.0, 5.0, 10.0, 20.0, 50.0, 100.0)
DEFAULT_BATCH_TAGS = ("BS20", "BS67", "BS134")

THREADS_ENV = "DIVERSCOPE_THREADS"

_CSV_COLUMNS = (
    "window", "threshold", "tag",
    "msssim_real", "msssim_synth", "msssim_delta",
    "fid", "is_real", "is_synth", "is_delta",
    "collapse_intra", "collapse_inter",
)

_KNOWN_KEYS = {
    "window_sizes", "thresholds", "batch_tags", "real_dir", "synth_dirs",
    "seed", "pairs", "real_probs", "synth_probs",
}
_REQUIRED_KEYS = {"real_dir", "synth_dirs"}


@dataclass
class SweepSpec:
    """Grid definition plus the dataset paths it runs over."""

    real_dir: Path
    synth_dirs: dict[str, Path]
    window_sizes: tuple[int, ...] = DEFAULT_WINDOW_SIZES
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    batch_tags: tuple[str, ...] | None = None
    seed: int = 0
    pairs: int = 670
    real_probs: Path | None = None
    synth_probs: dict[str, Path] = field(default_factory=dict)

    def resolved_tags(self) -> tuple[str, ...]:
        if self.batch_tags is not None:
            return tuple(self.batch_tags)
        return tuple(sorted(self.synth_dirs))

    @classmethod
    def from_json(cls, path) -> "SweepSpec":
        path = Path(path)
        if not path.is_file():
            raise ValueError(f"no such config file: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError("config must be a JSON object")
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise ValueError(f"unknown config key: {sorted(unknown)[0]!r}")
        missing = _REQUIRED_KEYS - set(raw)
        if missing:
            raise ValueError(f"missing config key: {sorted(missing)[0]!r}")
        kwargs: dict = {
            "real_dir": Path(raw["real_dir"]),
            "synth_dirs": {str(k): Path(v) for k, v in raw["synth_dirs"].items()},
        }
        if "window_sizes" in raw:
            kwargs["window_sizes"] = tuple(int(w) for w in raw["window_sizes"])
        if "thresholds" in raw:
            kwargs["thresholds"] = tuple(float(t) for t in raw["thresholds"])
        if "batch_tags" in raw:
            kwargs["batch_tags"] = tuple(str(t) for t in raw["batch_tags"])
        if "seed" in raw:
            kwargs["seed"] = int(raw["seed"])
        if "pairs" in raw:
            kwargs["pairs"] = int(raw["pairs"])
        if raw.get("real_probs") is not None:
            kwargs["real_probs"] = Path(raw["real_probs"])
        if "synth_probs" in raw:
            kwargs["synth_probs"] = {
                str(k): Path(v) for k, v in raw["synth_probs"].items()}
        return cls(**kwargs)

    def validate(self) -> None:
        """Fail fast on an empty grid or any missing input path."""
        if not self.window_sizes or not self.thresholds:
            raise ValueError("window_sizes and thresholds must be non-empty")
        tags = self.resolved_tags()
        if not tags:
            raise ValueError("no batch tags (synth_dirs is empty)")
        if not self.real_dir.is_dir():
            raise ValueError(f"real_dir does not exist: {self.real_dir}")
        for tag in tags:
            if tag not in self.synth_dirs:
                raise ValueError(f"batch tag {tag!r} has no synth_dirs entry")
            if not self.synth_dirs[tag].is_dir():
                raise ValueError(
                    f"synthetic dataset for {tag!r} does not exist: "
                    f"{self.synth_dirs[tag]}")
        if self.real_probs is not None and not self.real_probs.is_file():
            raise ValueError(f"real_probs does not exist: {self.real_probs}")
        for tag, p in self.synth_probs.items():
            if not Path(p).is_file():
                raise ValueError(f"synth_probs for {tag!r} does not exist: {p}")


@dataclass
class ReportRow:
    """One scored grid cell (window/threshold are None on baseline rows)."""

    window: int | None
    threshold: float | None
    tag: str
    msssim_real: float
    msssim_synth: float
    msssim_delta: float
    fid: float
    is_real: float | None
    is_synth: float | None
    is_delta: float | None
    collapse_intra: bool
    collapse_inter: bool | None

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _CSV_COLUMNS}


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")


def _normalized_images(images: np.ndarray, cfg: AiinConfig) -> np.ndarray:
    return np.stack([aiin_normalize(img, cfg) for img in images])


def _score_cell(real: Dataset, synth: Dataset, window: int | None,
                threshold: float | None, tag: str,
                sampling: PairSamplingSpec,
                is_real: float | None, is_synth: float | None) -> ReportRow:
    if window is None:
        real_images = real.images
        synth_images = synth.images
    else:
        cfg = AiinConfig(grid_n=window, contrast_threshold=threshold)
        real_images = _normalized_images(real.images, cfg)
        synth_images = _normalized_images(synth.images, cfg)

    real_ds = Dataset(label=real.label, paths=real.paths, images=real_images)
    synth_ds = Dataset(label=synth.label, paths=synth.paths, images=synth_images)
    ms_real = dataset_msssim(real_ds, sampling).mean
    ms_synth = dataset_msssim(synth_ds, sampling).mean
    intra = detect_intra_collapse(ms_real, ms_synth)
    fid = fid_score(dataset_features(real_images), dataset_features(synth_images))

    inter = None
    if is_real is not None and is_synth is not None:
        inter = detect_inter_collapse(is_real, is_synth)
    return ReportRow(
        window=window,
        threshold=threshold,
        tag=tag,
        msssim_real=ms_real,
        msssim_synth=ms_synth,
        msssim_delta=intra.delta,
        fid=fid,
        is_real=is_real,
        is_synth=is_synth,
        is_delta=None if inter is None else inter.delta,
        collapse_intra=intra.collapsed,
        collapse_inter=None if inter is None else inter.collapsed,
    )


def run_sweep(spec: SweepSpec, out_dir, threads: int | None = None
              ) -> tuple[list[ReportRow], dict[str, str]]:
    """Run the full grid and write report.csv, report.json, plotdata.csv.

    Rows are ordered baselines first (by tag), then grid cells by
    (window, threshold, tag). Cells are evaluated independently, so the
    report is identical for any thread count.
    """
    spec.validate()
    threads = _resolve_threads(threads)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    tags = spec.resolved_tags()
    real = load_dataset(spec.real_dir, label="real")
    synth = {tag: load_dataset(spec.synth_dirs[tag], label=tag) for tag in tags}
    sampling = PairSamplingSpec(n_pairs=spec.pairs, seed=spec.seed)

    def _is_mean(path):
        probs = load_probs(path)
        # 10 splits on protocol-size inputs; fewer when blocks would
        # otherwise degenerate to single rows
        n_splits = min(10, max(1, probs.shape[0] // 10))
        return inception_score(probs, n_splits=n_splits).mean

    is_real = None
    if spec.real_probs is not None:
        is_real = _is_mean(spec.real_probs)
    is_synth = {}
    for tag in tags:
        if tag in spec.synth_probs:
            is_synth[tag] = _is_mean(spec.synth_probs[tag])

    cells: list[tuple[int | None, float | None, str]] = []
    cells.extend((None, None, tag) for tag in tags)
    cells.extend(
        (w, t, tag)
        for w in spec.window_sizes for t in spec.thresholds for tag in tags)

    def evaluate(cell):
        window, threshold, tag = cell
        return _score_cell(real, synth[tag], window, threshold, tag, sampling,
                           is_real, is_synth.get(tag))

    if threads == 1:
        rows = [evaluate(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(evaluate, cells))

    paths = {
        "report_csv": str(out_dir / "report.csv"),
        "report_json": str(out_dir / "report.json"),
        "plotdata_csv": str(out_dir / "plotdata.csv"),
    }
    _write_report_csv(paths["report_csv"], rows)
    _write_report_json(paths["report_json"], spec, rows)
    _write_plotdata_csv(paths["plotdata_csv"], rows)
    return rows, paths


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9f}"
    return str(value)


def _write_report_csv(path, rows: list[ReportRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(_CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(getattr(row, c)) for c in _CSV_COLUMNS) + "\n")


def _write_report_json(path, spec: SweepSpec, rows: list[ReportRow]) -> None:
    payload = {
        "grid": {
            "window_sizes": list(spec.window_sizes),
            "thresholds": list(spec.thresholds),
            "batch_tags": list(spec.resolved_tags()),
            "seed": spec.seed,
            "pairs": spec.pairs,
        },
        "rows": [row.to_dict() for row in rows],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


_PLOT_METRICS = ("msssim_real", "msssim_synth", "msssim_delta",
                 "fid", "is_real", "is_synth", "is_delta")


def _write_plotdata_csv(path, rows: list[ReportRow]) -> None:
    # One (threshold, window, score) observation per metric per grid row;
    # baseline rows have no grid coordinates and are omitted.
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("metric,tag,window,threshold,score\n")
        for row in rows:
            if row.window is None:
                continue
            for metric in _PLOT_METRICS:
                value = getattr(row, metric)
                if value is None:
                    continue
                fh.write(f"{metric},{row.tag},{row.window},"
                         f"{_fmt(row.threshold)},{_fmt(value)}\n")

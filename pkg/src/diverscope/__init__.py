"""diverscope: adaptive input-image normalization and generative-diversity
scoring (multi-scale structural similarity, Fréchet feature distance,
class-spread score, and mode-collapse detection) for grayscale image sets."""

from diverscope.collapse import (
    CollapseReport,
    detect_inter_collapse,
    detect_intra_collapse,
)
from diverscope.fid import (
    FrechetDistance,
    GaussianStats,
    dataset_features,
    fid_score,
    fit_gaussian,
    frechet_distance,
    load_features,
    matrix_sqrt_psd,
    pixel_features,
)
from diverscope.formats import read_fvec1, read_matrix, write_csv_matrix, write_fvec1
from diverscope.image import (
    Dataset,
    load_dataset,
    load_image,
    resize_bilinear,
    save_image,
)
from diverscope.inception import IsResult, inception_score, load_probs
from diverscope.msssim import (
    MsSsimParams,
    PairSamplingSpec,
    PairScores,
    ScaleComponents,
    dataset_msssim,
    effective_scales,
    msssim,
    ssim_scale,
)
from diverscope.normalize import (
    AiinConfig,
    AiinNormalizer,
    aiin_normalize,
    clip_histogram,
    normalize_dataset,
    tile_lut,
)
from diverscope.simulate import SimSpec, generate_modes, oracle_probs, templates
from diverscope.sweep import ReportRow, SweepSpec, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AiinConfig",
    "AiinNormalizer",
    "CollapseReport",
    "Dataset",
    "FrechetDistance",
    "GaussianStats",
    "IsResult",
    "MsSsimParams",
    "PairSamplingSpec",
    "PairScores",
    "ReportRow",
    "ScaleComponents",
    "SimSpec",
    "SweepSpec",
    "aiin_normalize",
    "clip_histogram",
    "dataset_features",
    "dataset_msssim",
    "detect_inter_collapse",
    "detect_intra_collapse",
    "effective_scales",
    "fid_score",
    "fit_gaussian",
    "frechet_distance",
    "generate_modes",
    "inception_score",
    "load_dataset",
    "load_features",
    "load_image",
    "load_probs",
    "matrix_sqrt_psd",
    "msssim",
    "normalize_dataset",
    "oracle_probs",
    "pixel_features",
    "read_fvec1",
    "read_matrix",
    "resize_bilinear",
    "run_sweep",
    "save_image",
    "ssim_scale",
    "templates",
    "tile_lut",
    "write_csv_matrix",
    "write_fvec1",
]

"""Batch feature-activation and class-probability exporter.

Runs a pretrained image classifier over a directory and writes FVEC1 or
CSV matrices (plus a provenance sidecar) in the exact formats the
diverscope scoring core consumes.
"""

from extractor.models import available_models, build_model, pool_width
from extractor.pipeline import ExtractorConfig, extract, list_images, preprocess

__version__ = "0.1.0"

__all__ = [
    "ExtractorConfig",
    "available_models",
    "build_model",
    "extract",
    "list_images",
    "pool_width",
    "preprocess",
]

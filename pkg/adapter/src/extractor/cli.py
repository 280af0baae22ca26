"""CLI: run a pretrained classifier over an image directory and export
feature activations or class probabilities for the scoring toolkit."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from extractor.models import available_models
from extractor.pipeline import ExtractorConfig, extract


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diverscope-extract",
        description="Export per-image feature activations (for FID) or "
                    "softmax class probabilities (for IS) from a "
                    "pretrained classifier.")
    parser.add_argument("--dir", required=True, type=Path,
                        help="directory of PNG/JPEG images")
    parser.add_argument("--out", required=True, type=Path,
                        help="output matrix file (a .meta.json sidecar is "
                             "written next to it)")
    parser.add_argument("--mode", choices=("features", "probs"),
                        default="features")
    parser.add_argument("--model", choices=available_models(),
                        default="inception_v3")
    parser.add_argument("--layer", choices=("pool", "logits"), default="pool",
                        help="feature source in features mode")
    parser.add_argument("--batch", type=int, default=8)
    parser.add_argument("--format", dest="fmt", choices=("fvec1", "csv"),
                        default="fvec1")
    parser.add_argument("--size", type=int, default=299,
                        help="input resize (bilinear, default 299)")
    parser.add_argument("--weights", default="auto",
                        help="auto (ImageNet pretrained), none (seeded "
                             "random init, offline testing only), or a "
                             "local state-dict path")
    parser.add_argument("--lenient", action="store_true",
                        help="exit 0 even if some images were skipped")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = ExtractorConfig(
        model=args.model,
        weights=args.weights,
        mode=args.mode,
        layer=args.layer,
        size=args.size,
        batch_size=args.batch,
        fmt=args.fmt,
        lenient=args.lenient,
    )
    try:
        summary = extract(args.dir, args.out, config)
    except (ValueError, OSError) as exc:
        print(f"diverscope-extract: error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary))
    if summary["skipped"] and not config.lenient:
        print(f"diverscope-extract: {summary['skipped']} file(s) skipped "
              "(pass --lenient to tolerate)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: normalize, msssim, fid, is, sweep, simulate.

Machine-readable JSON goes to stdout; progress and diagnostics go to
stderr. Exit status is 0 on success and nonzero on any failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from diverscope.collapse import detect_intra_collapse
from diverscope.fid import dataset_features, fid_score, load_features
from diverscope.formats import write_fvec1
from diverscope.image import load_dataset, save_image
from diverscope.inception import inception_score, load_probs
from diverscope.msssim import PairSamplingSpec, dataset_msssim
from diverscope.normalize import AiinConfig, normalize_dataset
from diverscope.simulate import SimSpec, generate_modes, oracle_probs
from diverscope.sweep import SweepSpec, run_sweep


def _cmd_normalize(args) -> dict:
    cfg = AiinConfig(grid_n=args.grid, contrast_threshold=args.threshold,
                     interpolation=args.mode)
    ds = load_dataset(args.in_dir)
    out = normalize_dataset(ds, cfg, args.out_dir)
    print(f"diverscope: normalized {len(out)} images -> {args.out_dir}",
          file=sys.stderr)
    return {"count": len(out), "out_dir": str(args.out_dir)}


def _cmd_msssim(args) -> dict:
    spec = PairSamplingSpec(n_pairs=args.pairs, seed=args.seed)
    result_a = dataset_msssim(load_dataset(args.dir_a), spec)
    if args.dir_b is None:
        if args.pairs_csv:
            result_a.to_csv(args.pairs_csv)
        return {"mean": result_a.mean, "n_pairs": spec.n_pairs}
    if args.pairs_csv:
        raise ValueError("--pairs-csv is only available when scoring a single dataset")
    result_b = dataset_msssim(load_dataset(args.dir_b), spec)
    return detect_intra_collapse(result_a.mean, result_b.mean).to_dict()


def _cmd_fid(args) -> dict:
    if args.features == "pixel":
        real = dataset_features(load_dataset(args.real_src).images)
        synth = dataset_features(load_dataset(args.synth_src).images)
    else:
        real = load_features(args.real_src)
        synth = load_features(args.synth_src)
    return {"fid": fid_score(real, synth)}


def _cmd_is(args) -> dict:
    result = inception_score(load_probs(args.probs_file), n_splits=args.splits)
    return {"mean": result.mean, "std": result.std}


def _cmd_sweep(args) -> dict:
    spec = SweepSpec.from_json(args.config)
    rows, paths = run_sweep(spec, args.out_dir)
    print(f"diverscope: sweep wrote {len(rows)} rows -> {args.out_dir}",
          file=sys.stderr)
    return {"rows": len(rows), **paths}


def _cmd_simulate(args) -> dict:
    spec = SimSpec(k_modes=args.modes, n_images=args.images, side=args.side,
                   noise_amp=args.noise, seed=args.seed)
    ds = generate_modes(spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for path, img in ds:
        save_image(img, out_dir / path.name)
    probs_path = None
    if args.probs:
        write_fvec1(args.probs, oracle_probs(ds, spec))
        probs_path = str(args.probs)
    return {"count": len(ds), "out_dir": str(out_dir), "probs": probs_path}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diverscope",
        description="Normalize grayscale image sets and score their "
                    "generative diversity.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="adaptively normalize a dataset")
    p.add_argument("in_dir", type=Path)
    p.add_argument("out_dir", type=Path)
    p.add_argument("--grid", type=int, default=8, metavar="N",
                   help="windows per axis (default 8)")
    p.add_argument("--threshold", type=float, default=10.0, metavar="T",
                   help="contrast clip threshold, 0 disables (default 10)")
    p.add_argument("--mode", choices=("bilinear-stitch", "per-tile-hard"),
                   default="bilinear-stitch")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("msssim", help="pairwise similarity of one dataset, "
                                      "or the intra-class collapse verdict of two")
    p.add_argument("dir_a", type=Path, help="dataset (real when two are given)")
    p.add_argument("dir_b", type=Path, nargs="?", default=None,
                   help="synthetic dataset")
    p.add_argument("--pairs", type=int, default=670)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs-csv", type=Path, default=None,
                   help="export per-pair scores (single-dataset mode)")
    p.set_defaults(func=_cmd_msssim)

    p = sub.add_parser("fid", help="distance between two feature sets")
    p.add_argument("real_src", type=Path)
    p.add_argument("synth_src", type=Path)
    p.add_argument("--features", choices=("pixel", "file"), default="pixel",
                   help="pixel: image directories; file: FVEC1/CSV matrices")
    p.set_defaults(func=_cmd_fid)

    p = sub.add_parser("is", help="class-spread score of a probability matrix")
    p.add_argument("probs_file", type=Path)
    p.add_argument("--splits", type=int, default=10)
    p.set_defaults(func=_cmd_is)

    p = sub.add_parser("sweep", help="score the window/threshold grid from a config")
    p.add_argument("config", type=Path, help="JSON sweep configuration")
    p.add_argument("--out-dir", type=Path, default=Path("."),
                   help="where report.csv/report.json/plotdata.csv go")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="generate a multi-mode test dataset")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--modes", type=int, required=True, metavar="K")
    p.add_argument("--images", type=int, required=True, metavar="N")
    p.add_argument("--side", type=int, default=128)
    p.add_argument("--noise", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probs", type=Path, default=None,
                   help="also write oracle class probabilities (FVEC1)")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"diverscope: error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(payload))
    return 0


if __name__ == "__main__":
    sys.exit(main())

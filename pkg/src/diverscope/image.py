"""Image decoding, grayscale conversion, bilinear resizing, and dataset ingestion."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from diverscope.validation import check_gray_image, round_half_up

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg"}

# ITU-R BT.601 luminance weights (sum to 1, so (v,v,v) maps back to v).
_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def load_image(path) -> np.ndarray:
    """Decode a PNG or JPEG file into an 8-bit grayscale array.

    Color inputs are converted with integer luminance
    round(0.299 R + 0.587 G + 0.114 B); 8-bit grayscale inputs pass
    through untouched.

    Raises:
        ValueError: unreadable file, unsupported codec, or zero-dimension
            image.
    """
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise ValueError(f"zero-dimension image: {path}")
            if im.mode == "L":
                return np.asarray(im, dtype=np.uint8)
            rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise ValueError(f"unsupported or corrupt image file: {path}") from exc
    except OSError as exc:
        raise ValueError(f"unreadable image file: {path}: {exc}") from exc
    return round_half_up(rgb @ _LUMA).astype(np.uint8)


def save_image(img, path) -> None:
    """Write an 8-bit grayscale PNG."""
    arr = check_gray_image(img)
    Image.fromarray(arr, mode="L").save(Path(path), format="PNG")


def _source_coords(n_out: int, n_in: int) -> np.ndarray:
    # Half-pixel-center mapping: source = (i + 0.5) * (in / out) - 0.5,
    # clamped to the valid coordinate range.
    coords = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    return np.clip(coords, 0.0, n_in - 1.0)


def resize_bilinear(img, out_w: int, out_h: int) -> np.ndarray:
    """Resize with bilinear interpolation on half-pixel-center coordinates.

    Output intensities are rounded half away from zero and clamped to
    [0, 255]. Resizing to the input dimensions is an exact identity.
    """
    arr = check_gray_image(img)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    in_h, in_w = arr.shape
    if (out_w, out_h) == (in_w, in_h):
        return arr.copy()

    src = arr.astype(np.float64)
    xs = _source_coords(out_w, in_w)
    ys = _source_coords(out_h, in_h)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    tx = xs - x0
    ty = ys - y0

    top = src[y0[:, None], x0[None, :]] * (1.0 - tx) + src[y0[:, None], x1[None, :]] * tx
    bot = src[y1[:, None], x0[None, :]] * (1.0 - tx) + src[y1[:, None], x1[None, :]] * tx
    out = top * (1.0 - ty)[:, None] + bot * ty[:, None]
    return np.clip(round_half_up(out), 0, 255).astype(np.uint8)


@dataclass
class Dataset:
    """An ordered set of uniformly sized grayscale images.

    ``paths`` keeps the provenance of each image (lexicographic order for
    directory loads); ``images`` is the (n, h, w) uint8 stack in the same
    order.
    """

    label: str
    paths: list[Path] = field(repr=False)
    images: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.paths) != len(self.images):
            raise ValueError("paths and images lengths differ")
        if len(set(map(str, self.paths))) != len(self.paths):
            raise ValueError("duplicate paths in dataset")
        if self.images.ndim != 3 or self.images.dtype != np.uint8:
            raise ValueError("images must be a (n, h, w) uint8 stack")

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(zip(self.paths, self.images))

    @property
    def items(self) -> list[tuple[Path, np.ndarray]]:
        return list(zip(self.paths, self.images))


def load_dataset(directory, resize_to: tuple[int, int] | None = None,
                 label: str | None = None) -> Dataset:
    """Load every decodable PNG/JPEG under a directory, sorted by filename.

    Ordering is lexicographic by name, independent of filesystem
    enumeration order. Undecodable files are reported to stderr and
    skipped; an empty or fully undecodable directory is an error.

    Args:
        directory: directory containing image files.
        resize_to: optional (width, height); when given every image is
            resized, otherwise all images must already share dimensions.
        label: dataset label (defaults to the directory name).
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"no such dataset directory: {directory}")
    candidates = sorted(
        (p for p in directory.iterdir()
         if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS),
        key=lambda p: p.name,
    )
    if not candidates:
        raise ValueError(f"no image files in {directory}")

    paths: list[Path] = []
    images: list[np.ndarray] = []
    for p in candidates:
        try:
            img = load_image(p)
        except ValueError as exc:
            print(f"diverscope: skipping {p}: {exc}", file=sys.stderr)
            continue
        if resize_to is not None:
            img = resize_bilinear(img, resize_to[0], resize_to[1])
        paths.append(p)
        images.append(img)
    if not images:
        raise ValueError(f"no decodable images in {directory}")

    shapes = {im.shape for im in images}
    if len(shapes) > 1:
        raise ValueError(
            f"images in {directory} have mixed dimensions {sorted(shapes)}; "
            "pass resize_to to unify them"
        )
    return Dataset(label=label or directory.name, paths=paths,
                   images=np.stack(images))

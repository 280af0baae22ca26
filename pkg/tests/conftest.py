import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from diverscope import save_image


@pytest.fixture
def write_dataset(tmp_path):
    """Write a list of uint8 arrays as PNGs into a fresh directory."""

    def _write(images, subdir="data", names=None):
        d = tmp_path / subdir
        d.mkdir(parents=True, exist_ok=True)
        names = names or [f"img_{i:04d}.png" for i in range(len(images))]
        for name, img in zip(names, images):
            save_image(np.asarray(img, dtype=np.uint8), d / name)
        return d

    return _write


def random_images(n, side, seed):
    rng = np.random.default_rng(seed)
    return [rng.integers(0, 256, size=(side, side), dtype=np.uint8)
            for _ in range(n)]

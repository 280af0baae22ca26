import numpy as np
import pytest

from diverscope import (
    Dataset,
    MsSsimParams,
    PairSamplingSpec,
    dataset_msssim,
    detect_intra_collapse,
    effective_scales,
    msssim,
    ssim_scale,
)
from diverscope.msssim import sample_pairs

from conftest import random_images
from oracles import reference_components, reference_msssim


def _pair(seed, side=128):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 256, size=(side, side), dtype=np.uint8)
    y = rng.integers(0, 256, size=(side, side), dtype=np.uint8)
    return x, y


class TestSsimScale:
    def test_identical_inputs_all_ones(self):
        x, _ = _pair(0, side=32)
        comp = ssim_scale(x, x)
        assert comp.luminance == 1.0
        assert comp.contrast == 1.0
        assert comp.structure == 1.0

    def test_constant_images(self):
        a = np.full((32, 32), 100, dtype=np.uint8)
        b = np.full((32, 32), 200, dtype=np.uint8)
        comp = ssim_scale(a, b)
        c1 = (0.01 * 255) ** 2
        expected_l = (2 * 100 * 200 + c1) / (100 ** 2 + 200 ** 2 + c1)
        assert comp.luminance == pytest.approx(expected_l, abs=1e-12)
        assert comp.luminance == pytest.approx(0.80003, abs=1e-5)
        assert comp.contrast == 1.0
        assert comp.structure == 1.0

    def test_matches_reference(self):
        x, y = _pair(7, side=32)
        comp = ssim_scale(x, y)
        ref = reference_components(x.astype(float), y.astype(float))
        for got, want in zip(comp, ref):
            assert got == pytest.approx(want, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            ssim_scale(np.zeros((16, 16), dtype=np.uint8),
                       np.zeros((16, 17), dtype=np.uint8))

    def test_smaller_than_window(self):
        small = np.zeros((8, 8), dtype=np.uint8)
        with pytest.raises(ValueError, match="window"):
            ssim_scale(small, small)


class TestMsSsim:
    def test_identity(self):
        x, _ = _pair(1)
        assert msssim(x, x) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_bit_exact(self):
        x, y = _pair(2)
        assert msssim(x, y) == msssim(y, x)

    def test_effective_scales_128(self):
        # 128 -> 64 -> 32 -> 16 fit an 11-pixel window; 8 does not
        assert effective_scales(128, 128) == 4

    def test_effective_scales_large(self):
        assert effective_scales(512, 512) == 5

    def test_matches_reference(self):
        x, y = _pair(3)
        assert msssim(x, y) == pytest.approx(reference_msssim(x, y), abs=1e-9)

    def test_range(self):
        for seed in range(5):
            x, y = _pair(seed, side=64)
            v = msssim(x, y)
            assert 0.0 <= v <= 1.0

    def test_shift_sensitivity(self):
        from diverscope import SimSpec, templates
        tpl = templates(SimSpec(k_modes=1, n_images=1, side=64, noise_amp=0, seed=3))[0]
        shifted = np.roll(tpl, 4, axis=1)
        assert msssim(tpl, shifted) < 1.0

    def test_weight_renormalization_default_params(self):
        p = MsSsimParams()
        assert p.c1 == pytest.approx((0.01 * 255) ** 2)
        assert p.c2 == pytest.approx((0.03 * 255) ** 2)
        assert p.c3 == pytest.approx(p.c2 / 2)

    def test_bad_params(self):
        with pytest.raises(ValueError):
            MsSsimParams(window_size=10)
        with pytest.raises(ValueError):
            MsSsimParams(weights=(0.5, -0.5, 0.3, 0.2, 0.1))


class TestDatasetMsSsim:
    def _dataset(self, images):
        from pathlib import Path
        return Dataset(label="t",
                       paths=[Path(f"{i}.png") for i in range(len(images))],
                       images=np.stack(images))

    def test_identical_copies_mean_one(self):
        img = random_images(1, 32, 5)[0]
        ds = self._dataset([img] * 4)
        result = dataset_msssim(ds, PairSamplingSpec(n_pairs=20, seed=1))
        assert result.mean == pytest.approx(1.0, abs=1e-12)

    def test_pair_count_and_range(self):
        ds = self._dataset(random_images(6, 32, 9))
        result = dataset_msssim(ds, PairSamplingSpec(n_pairs=50, seed=2))
        assert len(result.scores) == 50
        assert -1.0 <= result.mean <= 1.0

    def test_same_seed_same_pairs(self):
        ds = self._dataset(random_images(5, 32, 10))
        spec = PairSamplingSpec(n_pairs=30, seed=123)
        r1 = dataset_msssim(ds, spec)
        r2 = dataset_msssim(ds, spec)
        assert np.array_equal(r1.pairs, r2.pairs)
        assert np.array_equal(r1.scores, r2.scores)
        assert r1.mean == r2.mean

    def test_no_self_pairs(self):
        pairs = sample_pairs(7, PairSamplingSpec(n_pairs=500, seed=3))
        assert (pairs[:, 0] != pairs[:, 1]).all()
        assert pairs.min() >= 0 and pairs.max() < 7

    def test_too_few_images(self):
        ds = self._dataset(random_images(1, 32, 11))
        with pytest.raises(ValueError, match="at least 2"):
            dataset_msssim(ds, PairSamplingSpec(n_pairs=5, seed=0))

    def test_csv_export(self, tmp_path):
        ds = self._dataset(random_images(4, 32, 12))
        result = dataset_msssim(ds, PairSamplingSpec(n_pairs=10, seed=4))
        out = tmp_path / "pairs.csv"
        result.to_csv(out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "index_a,index_b,score"
        assert len(lines) == 11


class TestIntraCollapseRule:
    def test_higher_synth_collapses(self):
        report = detect_intra_collapse(0.50, 0.54)
        assert report.collapsed is True
        assert report.delta == pytest.approx(0.04)

    def test_equal_not_collapsed(self):
        report = detect_intra_collapse(0.50, 0.50)
        assert report.collapsed is False
        assert report.delta == 0.0

    def test_lower_synth_not_collapsed(self):
        report = detect_intra_collapse(0.52, 0.50)
        assert report.collapsed is False
        assert report.delta == pytest.approx(-0.02)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            detect_intra_collapse(float("nan"), 0.5)
        with pytest.raises(ValueError):
            detect_intra_collapse(0.5, float("inf"))

import numpy as np
import pytest

from diverscope import (
    FrechetDistance,
    GaussianStats,
    dataset_features,
    fid_score,
    fit_gaussian,
    frechet_distance,
    load_features,
    matrix_sqrt_psd,
    pixel_features,
    write_fvec1,
)
from diverscope.formats import write_csv_matrix

from oracles import reference_covariance, reference_frechet


def _random_psd(rng, d):
    a = rng.normal(size=(d, d))
    return a @ a.T + 0.1 * np.eye(d)


class TestFitGaussian:
    def test_hand_case(self):
        stats = fit_gaussian(np.array([[0.0, 0.0], [2.0, 2.0]]))
        assert np.allclose(stats.mean, [1.0, 1.0])
        assert np.allclose(stats.cov, [[2.0, 2.0], [2.0, 2.0]])

    def test_identical_rows_zero_cov(self):
        f = np.tile([3.0, -1.0, 2.0], (10, 1))
        stats = fit_gaussian(f)
        assert np.allclose(stats.cov, 0.0)

    def test_accepts_protocol_size(self):
        rng = np.random.default_rng(0)
        stats = fit_gaussian(rng.normal(size=(1340, 8)))
        assert stats.mean.shape == (8,)
        assert stats.cov.shape == (8, 8)

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(1)
        f = rng.normal(size=(40, 6)) * 3 + 1
        stats = fit_gaussian(f)
        mean_ref, cov_ref = reference_covariance(f)
        assert np.abs(stats.mean - mean_ref).max() < 1e-10
        assert np.abs(stats.cov - cov_ref).max() < 1e-10

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            fit_gaussian(np.ones((1, 4)))

    def test_rejects_non_finite(self):
        f = np.ones((3, 2))
        f[1, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            fit_gaussian(f)

    def test_cov_symmetric(self):
        rng = np.random.default_rng(2)
        stats = fit_gaussian(rng.normal(size=(25, 12)))
        assert np.abs(stats.cov - stats.cov.T).max() <= 1e-12


class TestMatrixSqrtPsd:
    def test_identity(self):
        assert np.allclose(matrix_sqrt_psd(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_defining_property_random(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            d = int(rng.integers(2, 33))
            m = _random_psd(rng, d)
            r = matrix_sqrt_psd(m)
            assert np.linalg.norm(r @ r - m, ord="fro") < 1e-8

    def test_rejects_asymmetric(self):
        m = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError, match="asymmetry"):
            matrix_sqrt_psd(m)

    def test_rejects_negative_definite(self):
        with pytest.raises(ValueError, match="not PSD"):
            matrix_sqrt_psd(np.diag([1.0, -0.5]))

    def test_clamps_rounding_noise(self):
        out = matrix_sqrt_psd(np.diag([1.0, -1e-9]))
        assert np.allclose(out, np.diag([1.0, 0.0]))


class TestFrechetDistance:
    def test_identical_is_zero(self):
        rng = np.random.default_rng(4)
        g = fit_gaussian(rng.normal(size=(100, 6)))
        assert frechet_distance(g, g) == pytest.approx(0.0, abs=1e-6)

    def test_analytic_mean_shift(self):
        a = GaussianStats(np.array([0.0]), np.array([[1.0]]))
        b = GaussianStats(np.array([3.0]), np.array([[1.0]]))
        assert frechet_distance(a, b) == pytest.approx(9.0, abs=1e-9)

    def test_analytic_variance_change(self):
        a = GaussianStats(np.array([0.0]), np.array([[1.0]]))
        b = GaussianStats(np.array([0.0]), np.array([[4.0]]))
        assert frechet_distance(a, b) == pytest.approx(1.0, abs=1e-9)

    def test_matches_eig_oracle_5d(self):
        rng = np.random.default_rng(5)
        a = GaussianStats(rng.normal(size=5), _random_psd(rng, 5))
        b = GaussianStats(rng.normal(size=5), _random_psd(rng, 5))
        assert frechet_distance(a, b) == pytest.approx(
            reference_frechet(a.mean, a.cov, b.mean, b.cov), abs=1e-6)

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        a = GaussianStats(rng.normal(size=8), _random_psd(rng, 8))
        b = GaussianStats(rng.normal(size=8), _random_psd(rng, 8))
        assert frechet_distance(a, b) == pytest.approx(frechet_distance(b, a), abs=1e-8)

    def test_dimension_mismatch(self):
        a = GaussianStats(np.zeros(2), np.eye(2))
        b = GaussianStats(np.zeros(3), np.eye(3))
        with pytest.raises(ValueError, match="mismatch"):
            frechet_distance(a, b)


class TestFidScore:
    def test_self_is_zero(self):
        rng = np.random.default_rng(7)
        f = rng.normal(size=(200, 16))
        assert fid_score(f, f) <= 1e-6

    def test_translation_sensitivity(self):
        rng = np.random.default_rng(8)
        real = rng.normal(size=(300, 10))
        shift = rng.normal(size=10)
        moved = real + shift
        assert fid_score(real, moved) == pytest.approx(float(shift @ shift), abs=1e-6)

    def test_dim_mismatch_names_both(self):
        rng = np.random.default_rng(9)
        with pytest.raises(ValueError, match="d=4.*d=5"):
            fid_score(rng.normal(size=(10, 4)), rng.normal(size=(10, 5)))

    def test_protocol_size_completes(self):
        rng = np.random.default_rng(10)
        real = rng.normal(size=(1340, 64))
        synth = rng.normal(size=(1340, 64)) + 0.1
        value = fid_score(real, synth)
        assert np.isfinite(value) and value >= 0


class TestPixelFeatures:
    def test_constant_image(self):
        img = np.full((32, 32), 128, dtype=np.uint8)
        f = pixel_features(img)
        assert f.shape == (64,)
        assert np.allclose(f, 128 / 255)

    def test_8x8_is_identity(self):
        rng = np.random.default_rng(11)
        img = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
        assert np.allclose(pixel_features(img), img.ravel() / 255.0)

    def test_checkerboard_16(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        for r in range(8):
            for c in range(8):
                if (r + c) % 2 == 0:
                    img[2 * r:2 * r + 2, 2 * c:2 * c + 2] = 255
        f = pixel_features(img).reshape(8, 8)
        expect = np.zeros((8, 8))
        expect[(np.add.outer(np.arange(8), np.arange(8)) % 2) == 0] = 1.0
        assert np.allclose(f, expect)


class TestLoadFeatures:
    def test_fvec1_roundtrip(self, tmp_path):
        m = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], dtype=np.float32)
        p = tmp_path / "f.fvec1"
        write_fvec1(p, m)
        out = load_features(p)
        assert out.shape == (2, 3)
        assert np.allclose(out, m)

    def test_csv_equivalent(self, tmp_path):
        m = np.array([[1.5, -2.25], [0.125, 8.0]])
        pf = tmp_path / "f.fvec1"
        pc = tmp_path / "f.csv"
        write_fvec1(pf, m)
        write_csv_matrix(pc, m, header=["a", "b"])
        assert np.allclose(load_features(pf), load_features(pc))

    def test_truncated_payload(self, tmp_path):
        p = tmp_path / "f.fvec1"
        write_fvec1(p, np.ones((2, 3), dtype=np.float32))
        blob = p.read_bytes()
        p.write_bytes(blob[:-4])
        with pytest.raises(ValueError, match="expected 24 payload bytes.*got 20"):
            load_features(p)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "f.bin"
        p.write_bytes(b"WRONG" + b"\x00" * 16)
        with pytest.raises(ValueError):
            load_features(p)

    def test_non_finite_rejected(self, tmp_path):
        p = tmp_path / "f.fvec1"
        m = np.ones((2, 2), dtype=np.float32)
        m[0, 1] = np.inf
        write_fvec1(p, m)
        with pytest.raises(ValueError, match="non-finite"):
            load_features(p)


class TestFrechetEstimator:
    def test_fit_then_distance(self):
        rng = np.random.default_rng(12)
        real = rng.normal(size=(100, 6))
        est = FrechetDistance().fit(real)
        assert est.distance(real) <= 1e-6
        moved = real + 2.0
        assert est.distance(moved) == pytest.approx(4.0 * 6, abs=1e-6)

    def test_unfitted_raises(self):
        with pytest.raises(ValueError, match="fitted"):
            FrechetDistance().distance(np.ones((3, 2)))


def test_dataset_features_shape():
    rng = np.random.default_rng(13)
    imgs = rng.integers(0, 256, size=(5, 32, 32), dtype=np.uint8)
    f = dataset_features(imgs)
    assert f.shape == (5, 64)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diverscope import (
    detect_inter_collapse,
    inception_score,
    load_probs,
    write_fvec1,
)
from diverscope.formats import write_csv_matrix


def _random_probs(rng, n, k):
    raw = rng.random((n, k)) + 1e-9
    return raw / raw.sum(axis=1, keepdims=True)


class TestInceptionScore:
    def test_uniform_rows_score_one(self):
        p = np.full((100, 4), 0.25)
        result = inception_score(p, n_splits=1)
        assert result.mean == pytest.approx(1.0, abs=1e-9)

    def test_balanced_one_hot_scores_class_count(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0]] * 50)
        result = inception_score(rows, n_splits=1)
        assert result.mean == pytest.approx(2.0, abs=1e-6)

    def test_hand_case(self):
        rows = np.array([[0.9, 0.1], [0.1, 0.9]] * 20)
        result = inception_score(rows, n_splits=1)
        assert result.mean == pytest.approx(1.44494, abs=1e-4)

    def test_split_partition_remainder_in_last(self):
        # 25 rows over 10 splits: blocks of 2, the last takes 7
        rng = np.random.default_rng(0)
        p = _random_probs(rng, 25, 3)
        result = inception_score(p, n_splits=10)
        assert result.n_splits == 10
        # manual recomputation of the last block
        block = 25 // 10
        rows = p[(10 - 1) * block:]
        assert len(rows) == 7

    def test_bounds_random_matrices(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            k = int(rng.integers(2, 12))
            p = _random_probs(rng, n, k)
            result = inception_score(p, n_splits=1)
            assert 1.0 - 1e-9 <= result.mean <= k + 1e-9

    def test_row_permutation_invariant_within_split(self):
        rng = np.random.default_rng(2)
        p = _random_probs(rng, 60, 5)
        base = inception_score(p, n_splits=1).mean
        for seed in range(5):
            perm = np.random.default_rng(seed).permutation(60)
            assert inception_score(p[perm], n_splits=1).mean == pytest.approx(
                base, abs=1e-9)

    @given(st.integers(0, 2**31))
    @settings(max_examples=40, deadline=None)
    def test_sharpening_never_decreases(self, seed):
        # mix balanced one-hot rows toward uniform; sharpening back to the
        # one-hot argmax cannot lower the single-split score
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 6))
        reps = int(rng.integers(2, 10))
        lam = float(rng.uniform(0.0, 0.9))
        onehot = np.tile(np.eye(k), (reps, 1))
        mixed = (1 - lam) * onehot + lam / k
        soft = inception_score(mixed, n_splits=1).mean
        sharp = inception_score(onehot, n_splits=1).mean
        assert sharp >= soft - 1e-9

    def test_cross_check_entropy_identity(self):
        # exp(mean KL) == exp(H(marginal) - mean H(rows)) as eps -> 0
        rng = np.random.default_rng(3)
        p = _random_probs(rng, 50, 4)
        direct = inception_score(p, n_splits=1, epsilon=1e-300).mean
        marginal = p.mean(axis=0)
        h_marginal = -(marginal * np.log(marginal)).sum()
        h_rows = -(p * np.log(p)).sum(axis=1).mean()
        assert direct == pytest.approx(float(np.exp(h_marginal - h_rows)), abs=1e-9)

    def test_std_over_splits(self):
        rng = np.random.default_rng(4)
        p = _random_probs(rng, 100, 3)
        result = inception_score(p, n_splits=10)
        assert result.std >= 0.0

    def test_too_many_splits(self):
        with pytest.raises(ValueError, match="splits"):
            inception_score(np.full((3, 2), 0.5), n_splits=4)

    def test_bad_epsilon(self):
        with pytest.raises(ValueError, match="epsilon"):
            inception_score(np.full((4, 2), 0.5), n_splits=1, epsilon=0.0)

    def test_row_sum_violation(self):
        p = np.full((4, 2), 0.5)
        p[2] = [0.5, 0.3]
        with pytest.raises(ValueError, match="row 2"):
            inception_score(p, n_splits=1)


class TestLoadProbs:
    def test_valid_file(self, tmp_path):
        rng = np.random.default_rng(5)
        p = _random_probs(rng, 1000, 2)
        path = tmp_path / "p.fvec1"
        write_fvec1(path, p)
        out = load_probs(path)
        assert out.shape == (1000, 2)

    def test_csv_matches_fvec1(self, tmp_path):
        rng = np.random.default_rng(6)
        p = _random_probs(rng, 10, 3)
        f1 = tmp_path / "p.fvec1"
        f2 = tmp_path / "p.csv"
        write_fvec1(f1, p)
        write_csv_matrix(f2, p)
        # fvec1 stores float32, so compare at that precision
        assert np.allclose(load_probs(f1), load_probs(f2), atol=1e-6)

    def test_row_sum_error_names_row(self, tmp_path):
        p = np.full((5, 2), 0.5)
        p[3] = [0.5, 0.3]
        path = tmp_path / "bad.csv"
        write_csv_matrix(path, p)
        with pytest.raises(ValueError, match="row 3 sums to 0.8"):
            load_probs(path)

    def test_negative_entry_rejected(self, tmp_path):
        p = np.array([[1.2, -0.2], [0.5, 0.5]])
        path = tmp_path / "neg.csv"
        write_csv_matrix(path, p)
        with pytest.raises(ValueError, match="outside"):
            load_probs(path)


class TestInterCollapseRule:
    def test_lower_synth_collapses(self):
        report = detect_inter_collapse(2.00, 1.26)
        assert report.collapsed is True
        assert report.delta == pytest.approx(-0.74)

    def test_equal_not_collapsed(self):
        report = detect_inter_collapse(1.50, 1.50)
        assert report.collapsed is False
        assert report.delta == 0.0

    def test_higher_synth_not_collapsed(self):
        report = detect_inter_collapse(1.30, 1.60)
        assert report.collapsed is False
        assert report.delta == pytest.approx(0.30)

    def test_rejects_scores_below_one(self):
        with pytest.raises(ValueError):
            detect_inter_collapse(0.5, 1.2)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            detect_inter_collapse(float("nan"), 1.2)

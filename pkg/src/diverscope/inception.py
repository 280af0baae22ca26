"""Class-spread score over per-image class probabilities.

For each split the per-row divergence between p(y|x) and the split's
marginal p(y) is averaged and exponentiated; the result ranges from 1
(all rows identical to the marginal) up to the class count (confident,
evenly spread predictions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from diverscope.formats import read_matrix
from diverscope.validation import check_prob_matrix


@dataclass(frozen=True)
class IsResult:
    mean: float
    std: float
    n_splits: int


def inception_score(probs, n_splits: int = 10, epsilon: float = 1e-12) -> IsResult:
    """Score a probability matrix over contiguous row splits.

    Rows are partitioned into ``n_splits`` equal contiguous blocks (the
    remainder joins the last block). Per block, each row contributes
    sum_y p(y|x) ln((p(y|x)+eps)/(p(y)+eps)) and the block score is the
    exponential of the mean contribution. Returns the mean and population
    standard deviation over block scores.
    """
    p = check_prob_matrix(probs)
    n, _ = p.shape
    if n_splits < 1:
        raise ValueError(f"n_splits must be >= 1, got {n_splits}")
    if n < n_splits:
        raise ValueError(f"{n} rows cannot fill {n_splits} splits")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")

    block = n // n_splits
    scores = []
    for s in range(n_splits):
        lo = s * block
        hi = (s + 1) * block if s < n_splits - 1 else n
        rows = p[lo:hi]
        marginal = rows.mean(axis=0)
        kl = (rows * (np.log(rows + epsilon) - np.log(marginal + epsilon))).sum(axis=1)
        scores.append(float(np.exp(kl.mean())))
    scores = np.asarray(scores)
    return IsResult(mean=float(scores.mean()), std=float(scores.std()),
                    n_splits=n_splits)


def load_probs(path) -> np.ndarray:
    """Read a probability matrix from an FVEC1 or CSV file and validate
    the row-sum and range invariants (errors name the offending row)."""
    return check_prob_matrix(read_matrix(path))

"""Mode-collapse decision rules over paired real/synthetic diversity scores."""

from __future__ import annotations

from dataclasses import dataclass, asdict

from diverscope.validation import check_finite_scalar


@dataclass(frozen=True)
class CollapseReport:
    """Paired scores plus the collapse verdict of the producing rule."""

    metric: str
    real_score: float
    synthetic_score: float
    delta: float
    collapsed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def detect_intra_collapse(real_mean: float, synth_mean: float) -> CollapseReport:
    """Intra-class rule: a synthetic set scoring a HIGHER mean pairwise
    similarity than the real set is flagged as collapsed (equal scores
    are not)."""
    r = check_finite_scalar(real_mean, "real_mean")
    s = check_finite_scalar(synth_mean, "synth_mean")
    return CollapseReport(
        metric="ms-ssim",
        real_score=r,
        synthetic_score=s,
        delta=s - r,
        collapsed=s > r,
    )


def detect_inter_collapse(real_is: float, synth_is: float) -> CollapseReport:
    """Inter-class rule: a synthetic set scoring a LOWER class-spread
    score than the real set is flagged as collapsed (equal scores are
    not)."""
    r = check_finite_scalar(real_is, "real_is")
    s = check_finite_scalar(synth_is, "synth_is")
    floor = 1.0 - 1e-9
    if r < floor or s < floor:
        raise ValueError(f"scores must be >= 1, got real={r} synth={s}")
    return CollapseReport(
        metric="inception-score",
        real_score=r,
        synthetic_score=s,
        delta=s - r,
        collapsed=s < r,
    )

"""Significance testing and uncertainty quantification for score differences."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm


@dataclass(frozen=True)
class PairedScores:
    """Per-observation score differences between two competing forecasts,
    evaluated on the same observations in the same order."""

    model_a: str
    model_b: str
    diffs: np.ndarray
    n_excluded: int = 0  # non-finite pairs dropped before construction

    def __post_init__(self):
        d = np.asarray(self.diffs, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diffs must be a non-empty 1-D array")
        object.__setattr__(self, "diffs", d)


def paired_scores(model_a, model_b, scores_a, scores_b):
    """Build PairedScores, excluding observations where either score is
    non-finite in both streams the same way (count recorded)."""
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("score streams must have equal length")
    with np.errstate(invalid="ignore"):  # inf - inf is handled below
        diffs = a - b
    # signed-infinite differences carry ranking information and are kept
    # (the test truncates them); only undefined inf - inf pairs are dropped
    keep = ~np.isnan(diffs)
    return PairedScores(model_a, model_b, diffs[keep], int(np.sum(~keep)))


@dataclass(frozen=True)
class TestResult:
    p_value: float
    n_permutations: int
    mean_diff: float
    seed: int
    n_truncated: int = 0

    def __post_init__(self):
        if not 1.0 / (self.n_permutations + 1) <= self.p_value <= 1.0:
            raise ValueError("p-value outside its attainable range")


def permutation_test(ps: PairedScores, n_perm=999, seed=0) -> TestResult:
    """Paired sign-flip permutation test, two-sided, with the add-one
    p-value estimator p = (1 + #{|mean flipped| >= |mean observed|}) / (n_perm + 1).

    Infinite differences are truncated to 10x the largest finite absolute
    difference (rank-preserving); the truncation count is reported.
    """
    if n_perm < 99:
        raise ValueError("use at least 99 permutations")
    d = ps.diffs.copy()
    infinite = ~np.isfinite(d)
    n_trunc = int(np.sum(infinite))
    if n_trunc:
        finite_max = np.max(np.abs(d[~infinite])) if np.any(~infinite) else 1.0
        cap = 10.0 * max(finite_max, 1.0)
        d[infinite] = np.sign(d[infinite]) * cap

    rng = np.random.default_rng(int(seed))
    observed = float(np.mean(d))
    signs = rng.integers(0, 2, size=(n_perm, d.size)) * 2 - 1
    perm_means = (signs @ d) / d.size
    n_extreme = int(np.sum(np.abs(perm_means) >= abs(observed)))
    p = (1.0 + n_extreme) / (n_perm + 1.0)
    return TestResult(p, n_perm, observed, int(seed), n_trunc)


def bootstrap_mean_distribution(values, n_boot=1000, seed=0) -> np.ndarray:
    """n_boot means of resamples-with-replacement of the input values."""
    if n_boot < 100:
        raise ValueError("use at least 100 bootstrap replicates")
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("values must be non-empty")
    rng = np.random.default_rng(int(seed))
    idx = rng.integers(0, v.size, size=(n_boot, v.size))
    return v[idx].mean(axis=1)


def mean_with_ci(values, level=0.95):
    """Normal-approximation confidence interval for the mean."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size < 2:
        raise ValueError("need at least 2 finite values")
    m = float(np.mean(v))
    se = float(np.std(v, ddof=1) / np.sqrt(v.size))
    z = float(norm.ppf(0.5 + level / 2.0))
    return m, m - z * se, m + z * se

"""CRPS machinery and the summary-statistic, log, and Brehmer scores."""

import math

import numpy as np
import pytest

from ppscores.estimators import Curve, kernel_intensity
from ppscores.geometry import PointPattern, RGrid, Window, area, uniform_rgrid
from ppscores.scoring import (Ensemble, Model, batch_summary_scores,
                              brehmer_intensity_score, crps_empirical,
                              f_function_score, integrated_crps,
                              intensity_score, k_function_score,
                              log_score_poisson, make_k_estimator,
                              poisson_f_reference, summary_statistic_score)
from ppscores.simulate import (HomPoisson, child_seed, constant_intensity,
                               sample)

W10 = Window(0.0, 10.0, 0.0, 10.0)


def pat(pts, w=W10):
    return PointPattern(np.asarray(pts, dtype=float), w)


# ---------------------------------------------------------------------------
# CRPS


def test_crps_hand_examples():
    assert abs(crps_empirical(1.0, [1.0, 1.0, 1.0])) < 1e-12
    assert abs(crps_empirical(0.0, [1.0, 1.0]) - 1.0) < 1e-12
    assert abs(crps_empirical(0.0, [-1.0, 1.0])) < 1e-12


def test_crps_matches_direct_double_sum():
    rng = np.random.default_rng(5)
    for _ in range(20):
        y = rng.normal()
        t = rng.normal(size=rng.integers(2, 30))
        n = t.size
        direct = (np.mean(np.abs(y - t))
                  - np.sum(np.abs(t[:, None] - t[None, :]))
                  / (2.0 * n * (n - 1)))
        assert abs(crps_empirical(y, t) - direct) < 1e-12


def test_crps_permutation_invariance():
    rng = np.random.default_rng(6)
    t = rng.normal(size=15)
    base = crps_empirical(0.3, t)
    for _ in range(5):
        # permutation changes only float summation order
        assert abs(crps_empirical(0.3, rng.permutation(t)) - base) < 1e-12


def test_crps_rejects_single_sample():
    with pytest.raises(ValueError):
        crps_empirical(0.0, [1.0])


def test_integrated_crps_weight_linearity():
    rng = np.random.default_rng(7)
    obs = rng.normal(size=10)
    mat = rng.normal(size=(6, 10))
    w = rng.uniform(0.1, 1.0, size=10)
    a = integrated_crps(obs, mat, w)
    b = integrated_crps(obs, mat, 3.0 * w)
    assert abs(b - 3.0 * a) < 1e-12
    assert integrated_crps(obs, mat, np.zeros(10)) == 0.0


# ---------------------------------------------------------------------------
# summary statistic scores


def test_degenerate_ensemble_zero_scores():
    y = sample(HomPoisson(0.5), W10, 42)
    ens = Ensemble((y, y))
    assert abs(intensity_score(y, ens, nx=32)) < 1e-12
    assert abs(k_function_score(y, ens)) < 1e-12
    grid = uniform_rgrid(1.5, 8)
    assert abs(f_function_score(y, ens, grid)) < 1e-12


def test_ensemble_member_permutation_invariance():
    rng_members = [sample(HomPoisson(0.5), W10, child_seed(1, i))
                   for i in range(4)]
    y = sample(HomPoisson(0.5), W10, 99)
    a = k_function_score(y, Ensemble(tuple(rng_members)))
    b = k_function_score(y, Ensemble(tuple(reversed(rng_members))))
    assert abs(a - b) < 1e-12


def test_translation_invariance_with_seed_reuse():
    y = sample(HomPoisson(0.5), W10, 7)
    members = [sample(HomPoisson(0.5), W10, child_seed(2, i))
               for i in range(5)]
    a = k_function_score(y, Ensemble(tuple(members)), intensity="constant")
    y2 = y.translate(20.0, 30.0)
    members2 = [m.translate(20.0, 30.0) for m in members]
    b = k_function_score(y2, Ensemble(tuple(members2)), intensity="constant")
    assert abs(a - b) < 1e-9


def test_summary_score_determinism_and_model_source():
    y = sample(HomPoisson(0.5), W10, 11)
    s1 = k_function_score(y, Model(HomPoisson(0.5)), n=10, seed=3)
    s2 = k_function_score(y, Model(HomPoisson(0.5)), n=10, seed=3)
    assert s1 == s2


def test_batch_scores_share_draws():
    obs = [sample(HomPoisson(0.5), W10, child_seed(4, i)) for i in range(3)]
    grid = uniform_rgrid(2.5, 16)
    est = make_k_estimator(grid, intensity="constant")
    vals = batch_summary_scores(obs, Model(HomPoisson(0.5)), est, grid,
                                n=10, seed=5)
    assert vals.shape == (3,)
    again = batch_summary_scores(obs, Model(HomPoisson(0.5)), est, grid,
                                 n=10, seed=5)
    assert np.array_equal(vals, again)


def test_f_function_score_se_forms():
    y = sample(HomPoisson(0.5), W10, 21)
    grid = uniform_rgrid(1.5, 8)
    from ppscores.estimators import f_hat

    ref = Curve(grid, f_hat(y, grid).values)
    assert abs(f_function_score(y, None, grid, form="se", reference=ref)) < 1e-14
    # analytic Poisson reference gives a small but nonzero score
    v = f_function_score(y, None, grid, form="se",
                         reference=poisson_f_reference(0.5))
    assert 0.0 <= v < 1.0


def test_k_score_upper_r_guard():
    y = sample(HomPoisson(0.5), W10, 22)
    with pytest.raises(ValueError):
        k_function_score(y, Model(HomPoisson(0.5)), upper_R=6.0, n=5)


# ---------------------------------------------------------------------------
# log and Brehmer scores


def test_log_score_empty_pattern():
    lam = constant_intensity(0.3)
    v = log_score_poisson(pat(np.empty((0, 2))), lam)
    assert abs(v - 0.3 * area(W10)) < 1e-9


def test_log_score_zero_intensity_infinite():
    from ppscores.simulate import IntensityFn

    lam = IntensityFn(lambda x, y: np.where(x < 5.0, 1.0, 0.0), 1.0, "half")
    assert log_score_poisson(pat([[7.0, 5.0]]), lam) == math.inf


def test_log_score_three_lambda_ordering():
    # expected score c|W| - lam0 |W| log c is minimized at c = lam0 = 0.5
    obs = [sample(HomPoisson(0.5), W10, child_seed(8, i)) for i in range(200)]
    means = {}
    for c in (0.4, 0.5, 0.6):
        lam = constant_intensity(c)
        means[c] = np.mean([log_score_poisson(y, lam) for y in obs])
    analytic = {c: c * 100.0 - 0.5 * 100.0 * math.log(c)
                for c in (0.4, 0.5, 0.6)}
    assert min(means, key=means.get) == 0.5
    assert (sorted(means, key=means.get)
            == sorted(analytic, key=analytic.get))


def test_brehmer_examples():
    lam = constant_intensity(0.3)
    total = 0.3 * area(W10)
    empty = pat(np.empty((0, 2)))
    assert abs(brehmer_intensity_score(empty, lam, 2.0)
               - (2.0 * total ** 2)) < 1e-9
    # |Lambda| = n kills the quadratic term
    lam1 = constant_intensity(2.0 / area(W10))
    y2 = pat([[1.0, 1.0], [2.0, 2.0]])
    v = brehmer_intensity_score(y2, lam1, 5.0)
    expected = -2.0 * math.log(2.0 / 100.0) + 2.0 * 2.0
    assert abs(v - expected) < 1e-9
    with pytest.raises(ValueError):
        brehmer_intensity_score(y2, lam1, 0.0)


def test_brehmer_direct_evaluation():
    # the score equals its defining formula term by term
    obs = [sample(HomPoisson(0.5), W10, child_seed(9, i)) for i in range(20)]
    for c_pen in (1e-6, 1.0):
        for lam_c in (0.4, 0.5, 0.6):
            lam = constant_intensity(lam_c)
            total = lam_c * area(W10)
            for y in obs:
                expected = (-y.n * math.log(lam_c) + y.n * total
                            + c_pen * (total - y.n) ** 2)
                got = brehmer_intensity_score(y, lam, c_pen)
                assert abs(got - expected) < 1e-8


def test_weight_zero_gives_zero_score():
    y = sample(HomPoisson(0.5), W10, 33)
    grid = uniform_rgrid(2.0, 8, weights=np.zeros(8))
    est = make_k_estimator(grid, intensity="constant")
    v = summary_statistic_score(y, Model(HomPoisson(0.5)), est, grid,
                                n=5, seed=1)
    assert v == 0.0


def test_weight_scaling_linearity():
    y = sample(HomPoisson(0.5), W10, 34)
    w = np.full(8, 1.0)
    g1 = uniform_rgrid(2.0, 8, weights=w)
    g3 = uniform_rgrid(2.0, 8, weights=3.0 * w)
    est1 = make_k_estimator(g1, intensity="constant")
    est3 = make_k_estimator(g3, intensity="constant")
    a = summary_statistic_score(y, Model(HomPoisson(0.5)), est1, g1, n=6, seed=2)
    b = summary_statistic_score(y, Model(HomPoisson(0.5)), est3, g3, n=6, seed=2)
    assert abs(b - 3.0 * a) < 1e-10

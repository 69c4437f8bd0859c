"""Minimum-contrast fitting: theoretical K-functions (with Monte-Carlo
oracles), the contrast optimizer, and K-score model selection."""

import math

import numpy as np
import pytest

from ppscores.estimators import k_hat, mean_curve
from ppscores.fitting import (ContrastProblem, contrast_objective,
                              default_init, fit_family_to_patterns,
                              fit_min_contrast, model_k, select_by_k_score,
                              to_model_spec)
from ppscores.geometry import RGrid, Window, area, uniform_rgrid
from ppscores.simulate import (CauchyKernel, Cluster, GaussianKernel, LGCP,
                               child_seed, sample)

W10 = Window(0.0, 10.0, 0.0, 10.0)
W20 = Window(0.0, 20.0, 0.0, 20.0)


def test_model_k_poisson_and_limits():
    grid = uniform_rgrid(2.5, 16)
    base = math.pi * grid.values ** 2
    assert np.allclose(model_k("poisson", {}, grid).values, base)
    # interaction -> 0 limits approach the Poisson K
    weak = {
        "thomas": {"kappa": 1e6, "sigma": 0.5},
        "matern": {"kappa": 1e6, "sigma": 0.5},
        "cauchy": {"kappa": 1e6, "sigma": 0.5},
        "vargamma": {"kappa": 1e6, "sigma": 0.5, "nu": 1.0},
        "lgcp": {"tau2": 1e-8, "scale": 1.0},
    }
    for family, theta in weak.items():
        k = model_k(family, theta, grid).values
        assert np.allclose(k, base, rtol=1e-3), family


def test_model_k_monotone_nonnegative():
    grid = uniform_rgrid(2.5, 32)
    thetas = {
        "thomas": {"kappa": 0.25, "sigma": 0.5},
        "matern": {"kappa": 0.25, "sigma": 0.5},
        "cauchy": {"kappa": 0.25, "sigma": 0.25},
        "vargamma": {"kappa": 0.25, "sigma": 0.3, "nu": 0.8},
        "lgcp": {"tau2": 0.5, "scale": 1.0},
    }
    for family, theta in thetas.items():
        v = model_k(family, theta, grid).values
        assert np.all(v >= 0.0), family
        assert np.all(np.diff(v) >= -1e-12), family


def _mc_k_oracle(spec, lam, n_sims, seed, grid):
    curves = np.array([
        k_hat(sample(spec, W10, child_seed(seed, i)), grid, lam).values
        for i in range(n_sims)
    ])
    return curves.mean(axis=0), curves.std(axis=0) / math.sqrt(n_sims)


@pytest.mark.parametrize("family,spec,theta,seed", [
    ("thomas", Cluster(0.25, 2.0, GaussianKernel(0.5)),
     {"kappa": 0.25, "sigma": 0.5}, 71),
    ("cauchy", Cluster(0.25, 2.0, CauchyKernel(0.25)),
     {"kappa": 0.25, "sigma": 0.25}, 72),
    ("lgcp", LGCP(math.log(0.5) - 0.25, 0.5, 1.0, grid_n=48),
     {"tau2": 0.5, "scale": 1.0}, 73),
])
def test_model_k_mc_oracle(family, spec, theta, seed):
    # the closed-form / quadrature K matches the simulation oracle using the
    # model's true intensity as the K-weight plug-in
    grid = uniform_rgrid(2.0, 16)
    lam = 0.5
    mean, se = _mc_k_oracle(spec, lam, 600, seed, grid)
    theo = model_k(family, theta, grid).values
    assert np.all(np.abs(mean - theo) <= 3.0 * se + 0.01)


def test_model_k_vargamma_mc_oracle():
    from ppscores.simulate import VarGammaKernel

    grid = uniform_rgrid(2.0, 16)
    spec = Cluster(0.25, 2.0, VarGammaKernel(0.3, 0.8))
    mean, se = _mc_k_oracle(spec, 0.5, 600, 77, grid)
    theo = model_k("vargamma", {"kappa": 0.25, "sigma": 0.3, "nu": 0.8},
                   grid).values
    assert np.all(np.abs(mean - theo) <= 3.0 * se + 0.01)


def test_model_k_matern_mc_oracle():
    from ppscores.simulate import DiskKernel

    grid = uniform_rgrid(2.0, 16)
    spec = Cluster(0.25, 2.0, DiskKernel(0.7))
    mean, se = _mc_k_oracle(spec, 0.5, 600, 78, grid)
    theo = model_k("matern", {"kappa": 0.25, "sigma": 0.7}, grid).values
    assert np.all(np.abs(mean - theo) <= 3.0 * se + 0.01)


def test_model_k_invalid_theta():
    grid = uniform_rgrid(2.0, 8)
    with pytest.raises(ValueError):
        model_k("thomas", {"kappa": -1.0, "sigma": 0.5}, grid)
    with pytest.raises(ValueError):
        model_k("nosuch", {}, grid)


# ---------------------------------------------------------------------------
# contrast objective and optimizer


def test_objective_zero_iff_equal():
    grid = uniform_rgrid(2.5, 32)
    theta = {"kappa": 0.25, "sigma": 0.5}
    k_true = model_k("thomas", theta, grid)
    problem = ContrastProblem("thomas", k_true, 2.5)
    assert contrast_objective(problem, theta) < 1e-20
    assert contrast_objective(problem, {"kappa": 0.3, "sigma": 0.5}) > 0.0


def test_exact_oracle_round_trip():
    grid = uniform_rgrid(2.5, 64)
    theta_star = {"kappa": 0.25, "sigma": 0.5}
    k_true = model_k("thomas", theta_star, grid)
    problem = ContrastProblem("thomas", k_true, 2.5)
    init = {k: 2.0 * v for k, v in theta_star.items()}
    fit = fit_min_contrast(problem, init, budget=3000)
    assert fit.objective < 1e-10
    for name, v in theta_star.items():
        assert abs(fit.theta[name] - v) <= 0.01 * v


def test_fit_positivity_guaranteed():
    grid = uniform_rgrid(2.5, 32)
    k_emp = model_k("thomas", {"kappa": 0.1, "sigma": 1.0}, grid)
    problem = ContrastProblem("thomas", k_emp, 2.5)
    fit = fit_min_contrast(problem, {"kappa": 1.0, "sigma": 0.1}, budget=600)
    assert all(v > 0 for v in fit.theta.values())


def test_quadrature_refinement_stability():
    theta = {"kappa": 0.25, "sigma": 0.5}
    vals = []
    for n_r in (64, 128):
        grid = uniform_rgrid(2.5, n_r)
        k_emp = model_k("thomas", {"kappa": 0.2, "sigma": 0.6}, grid)
        problem = ContrastProblem("thomas", k_emp, 2.5)
        vals.append(contrast_objective(problem, theta))
    assert abs(vals[1] - vals[0]) <= 0.01 * abs(vals[0])


def test_thomas_synthetic_recovery():
    spec = Cluster(0.25, 2.0, GaussianKernel(0.5))
    patterns = [sample(spec, W10, child_seed(300, i)) for i in range(50)]
    fit, fitted_spec = fit_family_to_patterns("thomas", patterns, r_max=2.5)
    assert abs(fit.theta["kappa"] - 0.25) <= 0.25 * 0.25
    assert abs(fit.theta["sigma"] - 0.5) <= 0.25 * 0.5
    # matched intensity implies offspring mean = lam_hat / kappa_hat
    xi = fitted_spec.offspring_mean
    assert abs(xi - 2.0) <= 0.25 * 2.0


def test_contrast_problem_validation():
    grid = uniform_rgrid(2.0, 16)
    k_emp = model_k("poisson", {}, grid)
    with pytest.raises(ValueError):
        ContrastProblem("nosuch", k_emp, 2.0)
    with pytest.raises(ValueError):
        ContrastProblem("thomas", k_emp, 5.0)  # beyond the grid
    with pytest.raises(ValueError):
        ContrastProblem("thomas", k_emp, 2.0, exponent=0.0)


# ---------------------------------------------------------------------------
# selection


def test_select_single_candidate():
    spec = Cluster(0.2, 3.0, GaussianKernel(0.6))
    pats = [sample(spec, W20, child_seed(301, i)) for i in range(4)]
    res = select_by_k_score(["poisson"], pats[:2], pats[2:], n=10, seed=1,
                            n_boot=100)
    assert len(res.ranking) == 1
    assert not res.failures


def test_select_ranking_order_invariant():
    spec = Cluster(0.2, 3.0, GaussianKernel(0.6))
    pats = [sample(spec, W20, child_seed(302, i)) for i in range(6)]
    r1 = select_by_k_score(["poisson", "thomas"], pats[:3], pats[3:],
                           n=10, seed=2, n_boot=100)
    r2 = select_by_k_score(["thomas", "poisson"], pats[:3], pats[3:],
                           n=10, seed=2, n_boot=100)
    assert [c.family for c in r1.ranking] == [c.family for c in r2.ranking]


def test_select_truth_thomas_beats_poisson():
    from ppscores.inference import paired_scores, permutation_test

    spec = Cluster(0.25, 4.0, GaussianKernel(0.5))
    train = [sample(spec, W20, child_seed(303, i)) for i in range(8)]
    test = [sample(spec, W20, child_seed(304, i)) for i in range(8)]
    res = select_by_k_score(["thomas", "poisson"], train, test, n=30, seed=3,
                            n_boot=100)
    assert res.ranking[0].family == "thomas"
    by = {c.family: c.scores for c in res.ranking}
    ps = paired_scores("thomas", "poisson", by["thomas"], by["poisson"])
    assert permutation_test(ps, n_perm=999, seed=4).p_value < 0.05


def test_select_disjointness_enforced():
    spec = Cluster(0.2, 3.0, GaussianKernel(0.6))
    pats = [sample(spec, W20, child_seed(305, i)) for i in range(3)]
    with pytest.raises(ValueError):
        select_by_k_score(["poisson"], pats, pats)

"""Reproducible experiment runners for the two simulation studies, the
catalog parameter sweep, and the plot-based model selection.

Every runner derives all randomness from one root seed via `child_seed`, and
emits CSV tables whose rows are canonically ordered, so reruns with the same
configuration are byte-identical.
"""

import itertools
import os

import numpy as np

from .estimators import kernel_intensity
from .fitting import fit_family_to_patterns
from .geometry import PointPattern, Window, area, uniform_rgrid
from .inference import (bootstrap_mean_distribution, paired_scores,
                        permutation_test)
from .io import config_hash, provenance_line, write_json, write_table
from .models import STUDY1_WINDOW, STUDY2_WINDOW, study1_models, study2_models
from .scoring import (first_term, log_score_poisson, make_k_estimator,
                      pairing_term)
from .simulate import (build_mixture_intensity, child_seed, sample,
                       sample_inhom_poisson)

STUDY1_MODEL_ORDER = ("hP", "hP+", "ihP", "Str", "ihT")
STUDY2_MODEL_ORDER = ("F1", "F2", "F3", "F4", "F5", "F6")


def _provenance(cfg, seed, n):
    return provenance_line(config_hash=config_hash(cfg), seed=seed, n=n)


def _intensity_vectors(patterns, sigma, nx):
    return np.asarray([kernel_intensity(p, sigma=sigma, nx=nx).values.ravel()
                       for p in patterns])


def _score_matrix_crps(obs_vecs, draw_vecs_by_model, qw):
    """Per-observation CRPS scores against each model, sharing forecast draws
    and pairing terms; returns {model: np.ndarray over observations}."""
    out = {}
    for name, mat in draw_vecs_by_model.items():
        pair = pairing_term(mat, qw)
        out[name] = np.array([first_term(v, mat, qw) - pair / 2.0
                              for v in obs_vecs])
    return out


# ---------------------------------------------------------------------------
# Study 1: five models, intensity and K scores, 5x5 matrices


def run_study1(out_dir=None, seed=0, n_obs=30, n_draws=30, nx=128, sigma=1.25,
               upper_R=2.5, n_r=64, n_perm=999, full_scale=False,
               window=STUDY1_WINDOW, pairing="fresh"):
    """Mean-score and permutation-p-value matrices over the five models of
    the first simulation study, for the intensity and K-function scores.

    With `pairing="fresh"` (the default) every observation is scored against
    its own independent set of forecast draws, so the per-observation score
    differences feeding the sign-flip tests are exchangeable under the null.
    `pairing="shared"` reuses one draw set per forecast across all
    observations, which is n_obs-fold cheaper and leaves the mean scores
    unbiased, but couples the differences through draw-set luck and makes the
    permutation p-values anti-conservative.
    """
    if full_scale:
        n_obs, n_draws = 100, 100
    if pairing not in ("fresh", "shared"):
        raise ValueError(f"unknown pairing {pairing!r}")
    cfg = {"experiment": "study1", "seed": seed, "n_obs": n_obs,
           "n_draws": n_draws, "nx": nx, "sigma": sigma, "upper_R": upper_R,
           "n_r": n_r, "n_perm": n_perm, "pairing": pairing}
    models = study1_models(window)
    names = [m for m in STUDY1_MODEL_ORDER if m in models]

    obs = {g: [sample(models[g], window, child_seed(seed, 1, gi, j))
               for j in range(n_obs)]
           for gi, g in enumerate(names)}

    grid = uniform_rgrid(upper_R, n_r)
    k_est = make_k_estimator(grid, intensity="kernel", sigma=sigma)
    cell = area(window) / (nx * nx)
    qw_k = grid.quad_weights()

    obs_int = {g: _intensity_vectors(obs[g], sigma, nx) for g in names}
    obs_k = {g: np.asarray([k_est(p).values for p in obs[g]]) for g in names}

    if pairing == "shared":
        draws = {f: [sample(models[f], window, child_seed(seed, 2, fi, i))
                     for i in range(n_draws)]
                 for fi, f in enumerate(names)}
        draw_int = {f: _intensity_vectors(draws[f], sigma, nx) for f in names}
        draw_k = {f: np.asarray([k_est(p).values for p in draws[f]])
                  for f in names}
        scores = {"intensity": {}, "kfun": {}}
        for g in names:
            scores["intensity"][g] = _score_matrix_crps(obs_int[g], draw_int,
                                                        cell)
            scores["kfun"][g] = _score_matrix_crps(obs_k[g], draw_k, qw_k)
    else:
        scores = {s: {g: {f: np.empty(n_obs) for f in names} for g in names}
                  for s in ("intensity", "kfun")}
        for j in range(n_obs):
            for fi, f in enumerate(names):
                pats = [sample(models[f], window, child_seed(seed, 2, fi, j, i))
                        for i in range(n_draws)]
                mat_int = _intensity_vectors(pats, sigma, nx)
                mat_k = np.asarray([k_est(p).values for p in pats])
                half_int = pairing_term(mat_int, cell) / 2.0
                half_k = pairing_term(mat_k, qw_k) / 2.0
                for g in names:
                    scores["intensity"][g][f][j] = first_term(
                        obs_int[g][j], mat_int, cell) - half_int
                    scores["kfun"][g][f][j] = first_term(
                        obs_k[g][j], mat_k, qw_k) - half_k

    means = {s: {g: {f: float(np.mean(scores[s][g][f])) for f in names}
                 for g in names} for s in scores}
    pvalues = {s: {g: {} for g in names} for s in scores}
    for si, s in enumerate(sorted(scores)):
        for gi, g in enumerate(names):
            for fi, f in enumerate(names):
                if f == g:
                    continue
                ps = paired_scores(f, g, scores[s][g][f], scores[s][g][g])
                res = permutation_test(ps, n_perm=n_perm,
                                       seed=child_seed(seed, 3, si, gi, fi))
                pvalues[s][g][f] = res.p_value

    result = {"config": cfg, "models": names, "means": means,
              "pvalues": pvalues, "scores": scores}
    if out_dir:
        prov = _provenance(cfg, seed, n_draws)
        write_table(os.path.join(out_dir, "study1_means.csv"),
                    ["score", "truth", "forecast", "mean_score"],
                    [(s, g, f, means[s][g][f])
                     for s in sorted(means) for g in names for f in names],
                    prov)
        write_table(os.path.join(out_dir, "study1_pvalues.csv"),
                    ["score", "truth", "forecast", "p_value"],
                    [(s, g, f, pvalues[s][g][f])
                     for s in sorted(means) for g in names for f in names
                     if f != g],
                    prov)
        write_table(os.path.join(out_dir, "study1_scores.csv"),
                    ["score", "truth", "forecast", "obs_id", "value"],
                    [(s, g, f, j, scores[s][g][f][j])
                     for s in sorted(means) for g in names for f in names
                     for j in range(n_obs)],
                    prov)
    return result


# ---------------------------------------------------------------------------
# Study 2: Gaussian Poisson models, log score vs intensity score bandwidths


def run_study2(out_dir=None, seed=0, n_obs=100, n_draws=100,
               sigmas=(0.1, 0.2, 0.4, 0.8, 1.6), nx=128, box_sizes=(10, 100),
               n_box_reps=100, n_values=tuple(range(1, 16)), n_reps=100,
               n_perm=100, full_scale=False, window=STUDY2_WINDOW,
               truth="F1", pairing="fresh"):
    """Score streams for models F1..F6 under observations from F1, subsampled
    mean-score distributions, and mean permutation p-values versus the number
    of available observations.

    `pairing` has the same meaning as for run_study1: "fresh" (default) uses
    an independent forecast-draw set per observation, keeping the permutation
    tests honest; "shared" reuses one draw set per model, which is cheaper
    but anti-conservative.
    """
    if full_scale:
        n_obs, n_draws = 300, 300
    if pairing not in ("fresh", "shared"):
        raise ValueError(f"unknown pairing {pairing!r}")
    cfg = {"experiment": "study2", "seed": seed, "n_obs": n_obs,
           "n_draws": n_draws, "sigmas": list(sigmas), "nx": nx,
           "n_reps": n_reps, "n_perm": n_perm, "truth": truth,
           "pairing": pairing}
    intensities = study2_models()
    names = [m for m in STUDY2_MODEL_ORDER if m in intensities]

    obs = [sample_inhom_poisson(intensities[truth], window,
                                child_seed(seed, 1, j))
           for j in range(n_obs)]

    score_streams = {}  # score_name -> {model: values over observations}
    score_streams["log"] = {
        m: np.array([log_score_poisson(y, intensities[m]) for y in obs])
        for m in names
    }
    cell = area(window) / (nx * nx)
    if pairing == "shared":
        for s_i, sg in enumerate(sigmas):
            draw_vecs = {}
            for mi, m in enumerate(names):
                d = [sample_inhom_poisson(intensities[m], window,
                                          child_seed(seed, 2, mi, i))
                     for i in range(n_draws)]
                draw_vecs[m] = _intensity_vectors(d, sg, nx)
            obs_vecs = _intensity_vectors(obs, sg, nx)
            score_streams[f"intensity_s{sg:g}"] = _score_matrix_crps(
                obs_vecs, draw_vecs, cell)
    else:
        obs_vecs = {sg: _intensity_vectors(obs, sg, nx) for sg in sigmas}
        for sg in sigmas:
            score_streams[f"intensity_s{sg:g}"] = {m: np.empty(n_obs)
                                                   for m in names}
        for j in range(n_obs):
            for mi, m in enumerate(names):
                d = [sample_inhom_poisson(intensities[m], window,
                                          child_seed(seed, 2, mi, j, i))
                     for i in range(n_draws)]
                for sg in sigmas:
                    mat = _intensity_vectors(d, sg, nx)
                    score_streams[f"intensity_s{sg:g}"][m][j] = (
                        first_term(obs_vecs[sg][j], mat, cell)
                        - pairing_term(mat, cell) / 2.0)

    # subsampled mean-score distributions (boxplot data)
    box_rows = []
    for sn_i, sn in enumerate(sorted(score_streams)):
        for N in box_sizes:
            if N > n_obs:
                continue
            for rep in range(n_box_reps):
                rng = np.random.default_rng(child_seed(seed, 3, sn_i, N, rep))
                idx = rng.choice(n_obs, size=N, replace=False)
                for m in names:
                    box_rows.append(
                        (sn, m, N, rep,
                         float(np.mean(score_streams[sn][m][idx]))))

    # mean p-values of permutation tests vs the true model, per N
    pcurve = {}
    for sn_i, sn in enumerate(sorted(score_streams)):
        for m_i, m in enumerate(names):
            if m == truth:
                continue
            for N in n_values:
                ps = []
                for rep in range(n_reps):
                    rng = np.random.default_rng(child_seed(seed, 4, N, rep))
                    idx = rng.choice(n_obs, size=min(N, n_obs), replace=False)
                    pair = paired_scores(
                        m, truth,
                        score_streams[sn][m][idx],
                        score_streams[sn][truth][idx])
                    res = permutation_test(
                        pair, n_perm=n_perm,
                        seed=child_seed(seed, 5, sn_i, m_i, N, rep))
                    ps.append(res.p_value)
                pcurve[(sn, m, N)] = float(np.mean(ps))

    result = {"config": cfg, "models": names, "scores": score_streams,
              "box_rows": box_rows, "pcurves": pcurve}
    if out_dir:
        prov = _provenance(cfg, seed, n_draws)
        write_table(os.path.join(out_dir, "study2_scores.csv"),
                    ["score", "model", "obs_id", "value"],
                    [(sn, m, j, score_streams[sn][m][j])
                     for sn in sorted(score_streams) for m in names
                     for j in range(n_obs)],
                    prov)
        write_table(os.path.join(out_dir, "study2_boxdata.csv"),
                    ["score", "model", "n_obs", "rep", "mean_score"],
                    box_rows, prov)
        write_table(os.path.join(out_dir, "study2_pcurves.csv"),
                    ["score", "model", "n_obs", "mean_p"],
                    [(sn, m, N, pcurve[(sn, m, N)])
                     for sn in sorted(score_streams) for m in names
                     if m != truth for N in n_values],
                    prov)
    return result


# ---------------------------------------------------------------------------
# Catalog sweep: semi-parametric mixture intensity, cyclic cross-validation


def _split_periods(catalog, window, mag_floor=3.0):
    periods = catalog["period"]
    if periods is None:
        raise ValueError("catalog needs a period column for the sweep")
    mags = catalog["magnitude"]
    by_period = {}
    for p in sorted(set(int(v) for v in periods)):
        m = periods == p
        by_period[p] = {
            "x": catalog["x"][m], "y": catalog["y"][m],
            "magnitude": None if mags is None else mags[m],
        }
    return by_period


def _period_pattern(data, window, mag_floor=None):
    x, y, mags = data["x"], data["y"], data["magnitude"]
    if mag_floor is not None and mags is not None:
        keep = mags >= mag_floor
        x, y = x[keep], y[keep]
    return PointPattern(np.column_stack([x, y]), window)


def run_catalog_sweep(out_dir=None, seed=0, catalog=None, window=None,
                      alphas=tuple(np.round(np.arange(0.6, 1.0001, 0.05), 2)),
                      etas=(2.0, 4.0, 8.0, 16.0, 32.0), sigmas=(4.0, 8.0),
                      scores=("log", "intensity"), n_train=3, gap=1,
                      n_cycles=None, n_draws=20, nx=64, mag_floor=3.0,
                      mag_floor_smooth=3.5, smoothing_grid_n=256):
    """Mean scores over the (alpha, eta) mixture-model grid, estimated by
    cyclic cross-validation over the catalog's periods.

    Training periods supply the smoothing events (magnitude >= the smoothing
    floor when magnitudes are present) and the per-period total count; test
    periods supply the scored observations, with a `gap`-period break on both
    sides of the training window.
    """
    if catalog is None or window is None:
        raise ValueError("catalog data and window are required")
    cfg = {"experiment": "sweep", "seed": seed, "alphas": list(map(float, alphas)),
           "etas": list(map(float, etas)), "sigmas": list(map(float, sigmas)),
           "scores": list(scores), "n_train": n_train, "gap": gap,
           "n_draws": n_draws, "nx": nx}
    by_period = _split_periods(catalog, window, mag_floor)
    period_ids = sorted(by_period)
    P = len(period_ids)
    if P < n_train + 2 * gap + 1:
        raise ValueError("not enough periods for the requested split")
    cycles = range(P if n_cycles is None else min(n_cycles, P))
    cell = area(window) / (nx * nx)

    evals = {}  # (score_name, alpha, eta) -> list of per-observation scores
    for c in cycles:
        train_ids = [period_ids[(c + i) % P] for i in range(n_train)]
        blocked = set(train_ids)
        blocked.update(period_ids[(c - g - 1) % P] for g in range(gap))
        blocked.update(period_ids[(c + n_train + g) % P] for g in range(gap))
        test_ids = [p for p in period_ids if p not in blocked]
        if not test_ids:
            raise ValueError("empty test set; reduce n_train or gap")

        tx = np.concatenate([by_period[p]["x"] for p in train_ids])
        ty = np.concatenate([by_period[p]["y"] for p in train_ids])
        tm = ([by_period[p]["magnitude"] for p in train_ids])
        tmags = None if tm[0] is None else np.concatenate(tm)
        train_all = PointPattern(np.column_stack([tx, ty]), window)
        if tmags is not None:
            hi = tmags >= mag_floor_smooth
            lo = tmags >= mag_floor
        else:
            hi = lo = np.ones(train_all.n, dtype=bool)
        smoothing = PointPattern(train_all.points[hi], window)
        if smoothing.n == 0:
            raise ValueError("no smoothing events above the magnitude floor")
        total_count = float(np.sum(lo)) / n_train

        test_patterns = [_period_pattern(by_period[p], window, mag_floor
                                         if tmags is not None else None)
                         for p in test_ids]
        obs_vecs = {sg: _intensity_vectors(test_patterns, sg, nx)
                    for sg in (sigmas if "intensity" in scores else ())}

        for ai, alpha in enumerate(alphas):
            for ei, eta in enumerate(etas):
                lam = build_mixture_intensity(
                    train_all, smoothing, float(alpha), float(eta),
                    total_count, window, grid_n=smoothing_grid_n)
                if "log" in scores:
                    key = ("log", float(alpha), float(eta))
                    evals.setdefault(key, []).extend(
                        log_score_poisson(y, lam) for y in test_patterns)
                if "intensity" in scores:
                    dr = [sample_inhom_poisson(lam, window,
                                               child_seed(seed, 6, c, ai, ei, i))
                          for i in range(n_draws)]
                    for sg in sigmas:
                        mat = _intensity_vectors(dr, sg, nx)
                        pair = pairing_term(mat, cell)
                        key = (f"intensity_s{sg:g}", float(alpha), float(eta))
                        evals.setdefault(key, []).extend(
                            first_term(v, mat, cell) - pair / 2.0
                            for v in obs_vecs[sg])

    grid_rows = sorted(
        (sn, alpha, eta, float(np.mean(vals)))
        for (sn, alpha, eta), vals in evals.items()
    )
    result = {"config": cfg, "rows": grid_rows, "evals": evals}
    if out_dir:
        prov = _provenance(cfg, seed, n_draws)
        write_table(os.path.join(out_dir, "sweep_grid.csv"),
                    ["score", "alpha", "eta", "mean_score"], grid_rows, prov)
    return result


def make_synthetic_catalog(seed=0, window=Window(0.0, 100.0, 0.0, 100.0),
                           n_periods=8, alpha=0.75, eta=4.0, n_faults=40,
                           events_per_period=600, hi_jitter=0.5):
    """Synthetic earthquake-style catalog generated from a mixture intensity.

    A fixed "fault" pattern drives the smoothed component; every period
    contains one high-magnitude event near each fault location (so the
    training smoother reconstructs the generator's smoothed component) plus
    background events drawn from the mixture intensity at the given
    (alpha, eta).  The high-magnitude events are few relative to the
    background, keeping their concentration from biasing the likelihood
    surface.  Returns (catalog dict, truth intensity, fault pattern).
    """
    rng = np.random.default_rng(child_seed(seed, 0))
    # fault pattern: points scattered along a few random segments
    n_seg = 4
    pts = []
    for _ in range(n_seg):
        a = rng.uniform([window.xmin, window.ymin], [window.xmax, window.ymax])
        b = rng.uniform([window.xmin, window.ymin], [window.xmax, window.ymax])
        t = rng.uniform(size=n_faults // n_seg)
        seg = a[None, :] + t[:, None] * (b - a)[None, :]
        seg += rng.normal(scale=1.0, size=seg.shape)
        pts.append(seg)
    pts = np.concatenate(pts)
    pts[:, 0] = np.clip(pts[:, 0], window.xmin, window.xmax)
    pts[:, 1] = np.clip(pts[:, 1], window.ymin, window.ymax)
    faults = PointPattern(pts, window)

    truth = build_mixture_intensity(faults, faults, alpha, eta,
                                    events_per_period, window)
    xs, ys, mags, periods = [], [], [], []
    for p in range(n_periods):
        bg = sample_inhom_poisson(truth, window, child_seed(seed, 1, p))
        hi = faults.points + rng.normal(scale=hi_jitter,
                                        size=(faults.n, 2))
        hi[:, 0] = np.clip(hi[:, 0], window.xmin, window.xmax)
        hi[:, 1] = np.clip(hi[:, 1], window.ymin, window.ymax)
        xs.extend([bg.x, hi[:, 0]])
        ys.extend([bg.y, hi[:, 1]])
        mags.append(np.concatenate([np.full(bg.n, 3.1),
                                    np.full(faults.n, 3.6)]))
        periods.append(np.full(bg.n + faults.n, p, dtype=int))
    catalog = {
        "x": np.concatenate(xs), "y": np.concatenate(ys),
        "magnitude": np.concatenate(mags), "period": np.concatenate(periods),
    }
    return catalog, truth, faults


# ---------------------------------------------------------------------------
# Tree-style model selection: leave-half-out K-score evaluation


def run_tree_selection(out_dir=None, seed=0, patterns=None,
                       families=("poisson", "matern", "thomas", "vargamma",
                                 "cauchy", "lgcp"),
                       train_size=None, r_max=None, n_r=64, n_draws=30,
                       k_intensity="kernel", n_boot=500, n_perm=999,
                       lgcp_grid_n=32, max_splits=None):
    """K-function-score evaluation of cluster/Cox families over all
    train/test splits of the available plots.

    For each split, every family is fitted by minimum contrast on the mean
    empirical K of the training plots and scored on each test plot; scores
    are paired across families by (split, plot).
    """
    if not patterns or len(patterns) < 2:
        raise ValueError("need at least 2 plot patterns")
    window = patterns[0].window
    if any(p.window != window for p in patterns):
        raise ValueError("plots must share a window")
    n = len(patterns)
    if train_size is None:
        train_size = n // 2
    if not 1 <= train_size <= n - 1:
        raise ValueError("train_size must leave a non-empty test set")
    if r_max is None:
        r_max = min(window.sides) / 4.0
    cfg = {"experiment": "trees", "seed": seed, "families": list(families),
           "n_plots": n, "train_size": train_size, "r_max": r_max,
           "n_r": n_r, "n_draws": n_draws, "k_intensity": k_intensity}

    grid = uniform_rgrid(r_max, n_r)
    est = make_k_estimator(grid, intensity=k_intensity)
    splits = list(itertools.combinations(range(n), train_size))
    if max_splits is not None:
        splits = splits[:max_splits]

    from .scoring import Model, batch_summary_scores

    rows = []  # (family, split_id, plot_idx, value)
    failures = {}
    for si, train_idx in enumerate(splits):
        test_idx = [i for i in range(n) if i not in train_idx]
        train = [patterns[i] for i in train_idx]
        test = [patterns[i] for i in test_idx]
        for fi, fam in enumerate(families):
            try:
                fit, spec = fit_family_to_patterns(
                    fam, train, r_max=r_max, n_r=n_r,
                    lgcp_grid_n=lgcp_grid_n)
                vals = batch_summary_scores(test, Model(spec), est, grid,
                                            n=n_draws,
                                            seed=child_seed(seed, 7, si, fi))
                rows.extend((fam, si, o, float(v))
                            for o, v in zip(test_idx, vals))
            except Exception as exc:
                failures.setdefault(fam, []).append(f"split {si}: {exc}")

    by_family = {}
    for fam, si, o, v in rows:
        by_family.setdefault(fam, {})[(si, o)] = v
    ok_families = [f for f in families
                   if f in by_family and len(by_family[f]) == len(splits) * (n - train_size)]

    ranking = sorted(
        ((float(np.mean(list(by_family[f].values()))), f) for f in ok_families)
    )
    boots = {f: bootstrap_mean_distribution(
        list(by_family[f].values()), n_boot=n_boot,
        seed=child_seed(seed, 8, i))
        for i, f in enumerate(ok_families)}
    pvals = {}
    for i, fa in enumerate(ok_families):
        for j, fb in enumerate(ok_families):
            if j <= i:
                continue
            keys = sorted(by_family[fa])
            d_a = np.array([by_family[fa][k] for k in keys])
            d_b = np.array([by_family[fb][k] for k in keys])
            res = permutation_test(paired_scores(fa, fb, d_a, d_b),
                                   n_perm=n_perm,
                                   seed=child_seed(seed, 9, i, j))
            pvals[(fa, fb)] = res.p_value

    result = {"config": cfg, "rows": rows, "ranking": ranking,
              "boots": boots, "pvalues": pvals, "failures": failures,
              "n_evaluations": len(splits) * (n - train_size)}
    if out_dir:
        prov = _provenance(cfg, seed, n_draws)
        write_table(os.path.join(out_dir, "trees_scores.csv"),
                    ["family", "split", "plot", "value"],
                    sorted(rows), prov)
        write_table(os.path.join(out_dir, "trees_ranking.csv"),
                    ["family", "mean_score"],
                    [(f, m) for m, f in ranking], prov)
        write_table(os.path.join(out_dir, "trees_boot.csv"),
                    ["family", "rep", "boot_mean"],
                    [(f, i, v) for f in sorted(boots)
                     for i, v in enumerate(boots[f])], prov)
        write_table(os.path.join(out_dir, "trees_pvalues.csv"),
                    ["family_a", "family_b", "p_value"],
                    [(a, b, p) for (a, b), p in sorted(pvals.items())], prov)
        if failures:
            write_json(os.path.join(out_dir, "trees_failures.json"), failures)
    return result

"""Command-line interface: pattern simulation, summary estimation, scoring,
permutation testing, minimum-contrast fitting, and the four experiment
runners.  Every subcommand takes an explicit seed and emits CSV/JSON with a
provenance header, so reruns are byte-identical."""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import harness
from .estimators import (f_hat, k_hat, kernel_intensity,
                         kernel_intensity_at_points)
from .geometry import PointPattern, Window, uniform_rgrid
from .inference import paired_scores, permutation_test
from .io import (config_hash, provenance_line, read_catalog_csv,
                 read_pattern_csv, read_patterns_dir, read_scores_csv,
                 write_curve_csv, write_field_csv, write_json,
                 write_pattern_csv, write_scores_csv)
from .models import STUDY1_WINDOW, STUDY2_WINDOW, resolve_model
from .scoring import (Model, brehmer_intensity_score, f_function_score,
                      intensity_score, k_function_score, log_score_poisson)
from .simulate import (HomPoisson, InhomPoisson, child_seed,
                       constant_intensity, sample)
from .fitting import fit_family_to_patterns


def _parse_window(s):
    parts = [float(v) for v in s.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("window must be xmin,xmax,ymin,ymax")
    return Window(*parts)


def _model_ref(s):
    """A built-in model name, or @path to a JSON model config."""
    if s.startswith("@"):
        with open(s[1:]) as fh:
            return json.load(fh)
    return s


def _default_window(ref):
    if isinstance(ref, str) and ref.startswith("F"):
        return STUDY2_WINDOW
    return STUDY1_WINDOW


def _floats(s):
    return tuple(float(v) for v in s.split(","))


def _model_intensity(spec):
    """Poisson intensity of a model spec, for the log and Brehmer scores."""
    if isinstance(spec, HomPoisson):
        return constant_intensity(spec.lam)
    if isinstance(spec, InhomPoisson):
        return spec.intensity
    raise SystemExit("log/brehmer scores need a Poisson model")


def cmd_simulate(args):
    w = args.window or _default_window(args.model)
    spec = resolve_model(args.model, w)
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.n):
        p = sample(spec, w, child_seed(args.seed, i))
        write_pattern_csv(os.path.join(args.out, f"pattern_{i:04d}.csv"), p)
    return 0


def cmd_estimate(args):
    w = args.window or STUDY1_WINDOW
    p = read_pattern_csv(args.obs, w)
    prov = provenance_line(
        config_hash=config_hash({"stat": args.stat, "sigma": args.sigma,
                                 "upper_r": args.upper_r, "nx": args.nx,
                                 "n_r": args.n_r}),
        seed=0, n=p.n)
    if args.stat == "intensity":
        field = kernel_intensity(p, sigma=args.sigma, nx=args.nx)
        write_field_csv(args.out, field, prov)
    else:
        r_max = args.upper_r or min(w.sides) / 4.0
        grid = uniform_rgrid(r_max, args.n_r)
        if args.stat == "kfun":
            lam = (kernel_intensity_at_points(p, sigma=args.sigma)
                   if args.sigma else None)
            curve = k_hat(p, grid, intensity=lam)
        else:
            curve = f_hat(p, grid)
        write_curve_csv(args.out, curve, prov)
    return 0


def cmd_score(args):
    w = args.window or _default_window(args.model)
    spec = resolve_model(args.model, w)
    patterns, names = read_patterns_dir(args.obs, w)
    rows = []
    for i, (p, name) in enumerate(zip(patterns, names)):
        s = child_seed(args.seed, i)
        if args.score == "intensity":
            v = intensity_score(p, Model(spec), sigma=args.sigma, n=args.n,
                                seed=s)
        elif args.score == "kfun":
            v = k_function_score(p, Model(spec), upper_R=args.upper_r,
                                 n=args.n, seed=s)
        elif args.score == "ffun":
            grid = uniform_rgrid(args.upper_r or min(w.sides) / 4.0, 64)
            v = f_function_score(p, Model(spec), grid, n=args.n, seed=s)
        elif args.score == "log":
            v = log_score_poisson(p, _model_intensity(spec))
        else:
            v = brehmer_intensity_score(p, _model_intensity(spec), args.c)
        rows.append((os.path.splitext(name)[0], args.score, v, args.n, s))
    cfg = {"model": args.model if isinstance(args.model, str) else "custom",
           "score": args.score, "sigma": args.sigma, "upper_r": args.upper_r,
           "n": args.n, "seed": args.seed}
    write_scores_csv(args.out, rows,
                     provenance_line(config_hash=config_hash(cfg),
                                     seed=args.seed, n=args.n))
    return 0


def cmd_permtest(args):
    a = {r["obs_id"]: r["value"] for r in read_scores_csv(args.a)}
    b = {r["obs_id"]: r["value"] for r in read_scores_csv(args.b)}
    common = sorted(set(a) & set(b))
    if not common:
        raise SystemExit("no common obs_id between the two score files")
    ps = paired_scores(args.a, args.b,
                       np.array([a[k] for k in common]),
                       np.array([b[k] for k in common]))
    res = permutation_test(ps, n_perm=args.n_perm, seed=args.seed)
    write_json(args.out, {"p_value": res.p_value, "mean_diff": res.mean_diff,
                          "n": len(common), "n_perm": res.n_permutations,
                          "seed": args.seed})
    return 0


def cmd_fit(args):
    w = args.window or STUDY1_WINDOW
    patterns, _ = read_patterns_dir(args.train, w)
    fit, _spec = fit_family_to_patterns(args.family, patterns,
                                        r_max=args.rmax, n_r=args.n_r)
    write_json(args.out, {"family": fit.family, "theta_hat": fit.theta,
                          "objective": fit.objective,
                          "converged": fit.converged,
                          "n_evaluations": fit.n_evaluations})
    return 0 if (fit.converged or not args.strict) else 1


def _finite(d):
    vals = []

    def walk(v):
        if isinstance(v, dict):
            for u in v.values():
                walk(u)
        elif isinstance(v, (int, float)):
            vals.append(float(v))

    walk(d)
    return all(math.isfinite(v) for v in vals)


def cmd_study1(args):
    r = harness.run_study1(out_dir=args.out, seed=args.seed,
                           n_obs=args.n_obs, n_draws=args.n_draws,
                           n_perm=args.n_perm, full_scale=args.full_scale)
    ok = _finite(r["means"])
    return 0 if (ok or not args.strict) else 1


def cmd_study2(args):
    r = harness.run_study2(out_dir=args.out, seed=args.seed,
                           n_obs=args.n_obs, n_draws=args.n_draws,
                           n_reps=args.n_reps, n_perm=args.n_perm,
                           full_scale=args.full_scale)
    ok = all(np.all(np.isfinite(v)) for s in r["scores"].values()
             for v in s.values())
    return 0 if (ok or not args.strict) else 1


def cmd_sweep(args):
    if args.catalog:
        catalog = read_catalog_csv(args.catalog)
        w = args.window
        if w is None:
            raise SystemExit("--window is required with --catalog")
    else:
        catalog, _, _ = harness.make_synthetic_catalog(seed=args.seed)
        w = Window(0.0, 100.0, 0.0, 100.0)
    kwargs = {}
    if args.alphas:
        kwargs["alphas"] = args.alphas
    if args.etas:
        kwargs["etas"] = args.etas
    if args.scores:
        kwargs["scores"] = tuple(args.scores.split(","))
    r = harness.run_catalog_sweep(out_dir=args.out, seed=args.seed,
                                  catalog=catalog, window=w,
                                  n_train=args.n_train,
                                  n_cycles=args.n_cycles,
                                  n_draws=args.n_draws, **kwargs)
    ok = all(math.isfinite(row[3]) for row in r["rows"])
    return 0 if (ok or not args.strict) else 1


def cmd_trees(args):
    w = args.window or STUDY1_WINDOW
    patterns, _ = read_patterns_dir(args.plots, w)
    r = harness.run_tree_selection(out_dir=args.out, seed=args.seed,
                                   patterns=patterns,
                                   families=tuple(args.families.split(",")),
                                   train_size=args.train_size,
                                   n_draws=args.n_draws, n_perm=args.n_perm,
                                   max_splits=args.max_splits)
    return 0 if (not r["failures"] or not args.strict) else 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="ppscores",
        description="Simulate spatial point processes and evaluate "
                    "predictions with proper scoring rules.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_help):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help=out_help)
        p.add_argument("--window", type=_parse_window, default=None,
                       help="xmin,xmax,ymin,ymax")
        p.add_argument("--strict", action="store_true",
                       help="nonzero exit on any flagged cell")

    p = sub.add_parser("simulate", help="draw patterns from a model")
    common(p, "output directory for pattern CSVs")
    p.add_argument("--model", type=_model_ref, required=True,
                   help="built-in name (hP, hP+, ihP, Str, ihT, F1..F6) "
                        "or @config.json")
    p.add_argument("--n", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="summary statistic of one pattern")
    common(p, "output CSV")
    p.add_argument("--obs", required=True, help="pattern CSV")
    p.add_argument("--stat", choices=("intensity", "kfun", "ffun"),
                   required=True)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--upper-r", type=float, default=None)
    p.add_argument("--n-r", type=int, default=64)
    p.add_argument("--nx", type=int, default=128)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("score", help="score observed patterns against a model")
    common(p, "output scores CSV")
    p.add_argument("--obs", required=True, help="directory of pattern CSVs")
    p.add_argument("--model", type=_model_ref, required=True)
    p.add_argument("--score", required=True,
                   choices=("intensity", "kfun", "ffun", "log", "brehmer"))
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--upper-r", type=float, default=None)
    p.add_argument("--n", type=int, default=100, help="forecast draws")
    p.add_argument("--c", type=float, default=1.0,
                   help="count-penalty weight for the Brehmer score")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("permtest",
                       help="paired permutation test of two score CSVs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n-perm", type=int, default=999)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output JSON")
    p.set_defaults(func=cmd_permtest)

    p = sub.add_parser("fit", help="minimum-contrast fit of one family")
    common(p, "output JSON")
    p.add_argument("--family", required=True)
    p.add_argument("--train", required=True, help="directory of pattern CSVs")
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--n-r", type=int, default=64)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("study1", help="five-model score/p-value matrices")
    common(p, "output directory")
    p.add_argument("--n-obs", type=int, default=30)
    p.add_argument("--n-draws", type=int, default=30)
    p.add_argument("--n-perm", type=int, default=999)
    p.add_argument("--full-scale", action="store_true")
    p.set_defaults(func=cmd_study1)

    p = sub.add_parser("study2", help="Gaussian-model score and p-value study")
    common(p, "output directory")
    p.add_argument("--n-obs", type=int, default=100)
    p.add_argument("--n-draws", type=int, default=100)
    p.add_argument("--n-reps", type=int, default=100)
    p.add_argument("--n-perm", type=int, default=100)
    p.add_argument("--full-scale", action="store_true")
    p.set_defaults(func=cmd_study2)

    p = sub.add_parser("sweep", help="(alpha, eta) mixture-model score grid")
    common(p, "output directory")
    p.add_argument("--catalog", default=None,
                   help="catalog CSV (x,y[,magnitude][,period]); omitted = "
                        "built-in synthetic catalog")
    p.add_argument("--alphas", type=_floats, default=None)
    p.add_argument("--etas", type=_floats, default=None)
    p.add_argument("--scores", default=None, help="comma list: log,intensity")
    p.add_argument("--n-train", type=int, default=3)
    p.add_argument("--n-cycles", type=int, default=None)
    p.add_argument("--n-draws", type=int, default=20)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trees", help="K-score model selection over plots")
    common(p, "output directory")
    p.add_argument("--plots", required=True, help="directory of pattern CSVs")
    p.add_argument("--families", default="poisson,thomas,matern,cauchy")
    p.add_argument("--train-size", type=int, default=None)
    p.add_argument("--n-draws", type=int, default=30)
    p.add_argument("--n-perm", type=int, default=999)
    p.add_argument("--max-splits", type=int, default=None)
    p.set_defaults(func=cmd_trees)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

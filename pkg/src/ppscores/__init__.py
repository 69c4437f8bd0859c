"""Simulation and proper-score-based evaluation of spatial point process
predictions: samplers for Poisson/Strauss/cluster/Cox models, summary
statistic estimators with edge correction, CRPS-backed scores, permutation
tests, and minimum-contrast fitting."""

from .geometry import (PointPattern, RGrid, Window, area, erode,
                       pairwise_distances, translation_overlap, uniform_rgrid)
from .simulate import (Cluster, CauchyKernel, DiskKernel, GaussianKernel,
                       HomPoisson, InhomPoisson, IntensityFn, LGCP, McmcConfig,
                       Mixture, Strauss, VarGammaKernel,
                       build_mixture_intensity, child_seed,
                       constant_intensity, gaussian_intensity,
                       radial_intensity, sample, sample_cluster,
                       sample_hom_poisson, sample_inhom_poisson, sample_lgcp,
                       sample_strauss)
from .estimators import (Curve, IntensityField, default_bandwidth,
                         default_r_max, edge_correction, f_hat, k_hat,
                         kernel_intensity, mean_curve)
from .scoring import (Ensemble, Model, ScoreReport, batch_summary_scores,
                      brehmer_intensity_score, crps_empirical,
                      f_function_score, intensity_score, k_function_score,
                      log_score_poisson, summary_statistic_score)
from .inference import (PairedScores, TestResult, bootstrap_mean_distribution,
                        mean_with_ci, paired_scores, permutation_test)
from .fitting import (ContrastProblem, FitResult, fit_family_to_patterns,
                      fit_min_contrast, model_k, select_by_k_score)

__version__ = "0.1.0"

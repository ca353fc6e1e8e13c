"""Voronoi-area nearest-neighbour density estimation and two-class Bayes classification."""

from .baselines import classify, fit_kde, fit_kde_bayes, fit_lda, fit_qda, fit_voronoi_bayes
from .density import (
    ReferenceSample,
    TrainingSet,
    VoronoiDensityModel,
    correct_weights,
    count_raw_weights,
    density_at,
    density_curve,
    fit,
)
from .distributions import CASES, get_case
from .harness import ConfusionSummary, ExperimentConfig, run_experiment
from .spaces import SupportWindow, derive_symmetric_window, distance, sample_uniform, window_measure

__all__ = [
    "CASES",
    "ConfusionSummary",
    "ExperimentConfig",
    "ReferenceSample",
    "SupportWindow",
    "TrainingSet",
    "VoronoiDensityModel",
    "classify",
    "correct_weights",
    "count_raw_weights",
    "density_at",
    "density_curve",
    "derive_symmetric_window",
    "distance",
    "fit",
    "fit_kde",
    "fit_kde_bayes",
    "fit_lda",
    "fit_qda",
    "fit_voronoi_bayes",
    "get_case",
    "run_experiment",
    "sample_uniform",
    "window_measure",
]

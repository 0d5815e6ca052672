"""Protein family classification with an incrementally trainable fuzzy ARTMAP ensemble."""

__version__ = "0.1.0"

from .agreement import ErrorMatrix, build_error_matrix, kappa
from .ensemble import (
    EnsembleModel,
    PipelineConfig,
    build_ensemble,
    evaluate,
    increment_ensemble,
    predict_ensemble,
    run_experiment,
)
from .features import fit_normalizer, normalize, vectorize
from .fuzzy_artmap import FuzzyArtmap, complement_code
from .ga_selection import Candidate, GaConfig, evolve, exhaustive_best, fitness
from .sequence_io import ProteinSequence, parse_fasta, remove_outliers, split_datasets

__all__ = [
    "Candidate", "EnsembleModel", "ErrorMatrix", "FuzzyArtmap", "GaConfig", "PipelineConfig",
    "ProteinSequence", "build_ensemble", "build_error_matrix", "complement_code", "evaluate",
    "evolve", "exhaustive_best", "fit_normalizer", "fitness", "increment_ensemble", "kappa",
    "normalize", "parse_fasta", "predict_ensemble", "remove_outliers", "run_experiment",
    "split_datasets", "vectorize",
]

"""Shallow classifiers with balanced weighting and seeded determinism."""

from .data import (
    ALGORITHM_KINDS,
    DEFAULT_SEED,
    AlgorithmSpec,
    Dataset,
    EmptyData,
    NonFiniteInput,
    SingleClassData,
    default_hyperparameters,
    make_spec,
)
from .io import load_model, model_from_document, model_to_document, save_model
from .models import Model, fit, predict_proba

__all__ = [
    "ALGORITHM_KINDS",
    "DEFAULT_SEED",
    "AlgorithmSpec",
    "Dataset",
    "EmptyData",
    "Model",
    "NonFiniteInput",
    "SingleClassData",
    "default_hyperparameters",
    "fit",
    "load_model",
    "make_spec",
    "model_from_document",
    "model_to_document",
    "predict_proba",
    "save_model",
]

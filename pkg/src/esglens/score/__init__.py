"""Score prediction and evaluation.

Two from-scratch regressors map summary embeddings to ESG scores: a small
MLP trained with adaptive-moment gradient descent and a histogram
gradient-boosted tree ensemble. Reference scores for hermetic corpora are
synthesized with the percentile-and-weighted-category scheme.
"""

from .metrics import Metrics, ScoreKind, ScoreRecord, evaluate
from .mlp import MlpConfig, MlpModel, gradient_check, train_mlp
from .gbt import GbtConfig, GbtModel, train_gbt
from .reference import (
    CATEGORIES,
    CompanyMeasures,
    MeasureDefinition,
    MeasureKind,
    Polarity,
    synthesize_reference_scores,
)
from .summary import build_summary_embedding, render_summary
from .model_io import load_model, save_model

__all__ = [
    "Metrics", "ScoreKind", "ScoreRecord", "evaluate",
    "MlpConfig", "MlpModel", "gradient_check", "train_mlp",
    "GbtConfig", "GbtModel", "train_gbt",
    "CATEGORIES", "CompanyMeasures", "MeasureDefinition", "MeasureKind",
    "Polarity", "synthesize_reference_scores",
    "build_summary_embedding", "render_summary",
    "load_model", "save_model",
]

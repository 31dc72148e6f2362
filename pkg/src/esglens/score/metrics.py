"""Evaluation metrics and score records."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import LengthMismatchError, ZeroVarianceError


class ScoreKind(str, Enum):
    REFERENCE = "Reference"
    PREDICTED = "Predicted"


@dataclass(frozen=True)
class ScoreRecord:
    company_id: str
    fiscal_year: int
    score: float
    kind: ScoreKind
    model_run_id: Optional[str] = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 100.0:
            raise ValueError(f"score {self.score} outside [0, 100]")


@dataclass(frozen=True)
class Metrics:
    """Correlation metrics plus the training loss trajectory.

    r_squared is defined as the square of the Pearson correlation; when the
    correlation is undefined (zero variance) both fields are None and
    error_code carries the reason.
    """

    pearson_r: Optional[float]
    r_squared: Optional[float]
    loss_curve: Tuple[float, ...] = ()
    error_code: Optional[str] = None


def pearson(pred: Sequence[float], truth: Sequence[float]) -> float:
    """Product-moment correlation; raises on degenerate input."""
    x = np.asarray(pred, dtype=np.float64)
    y = np.asarray(truth, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise LengthMismatchError(
            f"pred has shape {x.shape}, truth has shape {y.shape}")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    if syy == 0.0:
        raise ZeroVarianceError("truth has zero variance")
    if sxx == 0.0:
        raise ZeroVarianceError("pred has zero variance")
    return float(np.dot(xc, yc) / np.sqrt(sxx * syy))


def evaluate(pred: Sequence[float], truth: Sequence[float],
             loss_curve: Sequence[float] = ()) -> Metrics:
    r = pearson(pred, truth)
    return Metrics(pearson_r=r, r_squared=r * r, loss_curve=tuple(loss_curve))


def metrics_or_error(pred: Sequence[float], truth: Sequence[float],
                     loss_curve: Sequence[float] = ()) -> Metrics:
    """evaluate(), but zero-variance degenerates into an error-coded result."""
    try:
        return evaluate(pred, truth, loss_curve)
    except ZeroVarianceError as exc:
        return Metrics(pearson_r=None, r_squared=None,
                       loss_curve=tuple(loss_curve), error_code=exc.code)

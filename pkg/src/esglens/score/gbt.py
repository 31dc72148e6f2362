"""Histogram gradient-boosted regression trees, from scratch.

Features are pre-binned into at most ``max_bin`` equal-frequency bins; each
boosting iteration fits one tree to the current residuals with greedy
variance-gain splits over bin boundaries. Splits whose gain falls below
``min_gain_to_split`` are rejected, so a degenerate node simply stays a leaf
(a stump-only tree is a valid outcome, not an error). The ensemble predicts
mean(y) + learning_rate * sum of tree outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ShapeMismatchError
from .metrics import Metrics, metrics_or_error


@dataclass(frozen=True)
class GbtConfig:
    max_bin: int = 512
    learning_rate: float = 0.01
    iterations: int = 50
    min_gain_to_split: float = 0.01
    feature_fraction: float = 0.8
    max_depth: int = 6
    min_samples_leaf: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.max_bin < 2:
            raise ValueError("max_bin must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 < self.feature_fraction <= 1:
            raise ValueError("feature_fraction must be in (0, 1]")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ValueError("max_depth and min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class _Node:
    value: float = 0.0
    feature: int = -1           # -1 marks a leaf
    bin_threshold: int = -1     # go left when bin_id <= threshold
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


def _bin_edges(column: np.ndarray, max_bin: int) -> np.ndarray:
    """Equal-frequency bin edges (strictly increasing, possibly empty)."""
    quantiles = np.quantile(column, np.linspace(0, 1, max_bin + 1)[1:-1])
    return np.unique(quantiles)


def _apply_bins(X: np.ndarray, edges: List[np.ndarray]) -> np.ndarray:
    binned = np.empty(X.shape, dtype=np.int32)
    for f in range(X.shape[1]):
        binned[:, f] = np.searchsorted(edges[f], X[:, f], side="left")
    return binned


def _fit_tree(binned: np.ndarray, residual: np.ndarray, indices: np.ndarray,
              features: np.ndarray, n_bins: np.ndarray, depth: int,
              cfg: GbtConfig) -> _Node:
    count = indices.size
    total = float(residual[indices].sum())
    mean = total / count
    if depth >= cfg.max_depth or count < 2 * cfg.min_samples_leaf:
        return _Node(value=mean)

    best_gain = -np.inf
    best: Optional[Tuple[int, int]] = None
    parent_term = total * total / count
    for f in features:
        column = binned[indices, f]
        counts = np.bincount(column, minlength=n_bins[f])
        sums = np.bincount(column, weights=residual[indices], minlength=n_bins[f])
        left_counts = np.cumsum(counts)[:-1]
        left_sums = np.cumsum(sums)[:-1]
        right_counts = count - left_counts
        right_sums = total - left_sums
        valid = (left_counts >= cfg.min_samples_leaf) & (right_counts >= cfg.min_samples_leaf)
        if not np.any(valid):
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = np.where(
                valid,
                left_sums ** 2 / left_counts + right_sums ** 2 / right_counts - parent_term,
                -np.inf)
        t = int(np.argmax(gains))
        if gains[t] > best_gain:
            best_gain = float(gains[t])
            best = (int(f), t)

    if best is None or best_gain < cfg.min_gain_to_split:
        return _Node(value=mean)
    feature, threshold = best
    mask = binned[indices, feature] <= threshold
    left = _fit_tree(binned, residual, indices[mask], features, n_bins,
                     depth + 1, cfg)
    right = _fit_tree(binned, residual, indices[~mask], features, n_bins,
                      depth + 1, cfg)
    return _Node(value=mean, feature=feature, bin_threshold=threshold,
                 left=left, right=right)


def _predict_tree(node: _Node, binned: np.ndarray) -> np.ndarray:
    out = np.empty(binned.shape[0], dtype=np.float64)
    stack = [(node, np.arange(binned.shape[0]))]
    while stack:
        current, idx = stack.pop()
        if current.is_leaf:
            out[idx] = current.value
            continue
        mask = binned[idx, current.feature] <= current.bin_threshold
        stack.append((current.left, idx[mask]))
        stack.append((current.right, idx[~mask]))
    return out


class GbtModel:
    def __init__(self, config: GbtConfig, base_prediction: float,
                 trees: List[_Node], edges: List[np.ndarray], n_features: int):
        self.config = config
        self.base_prediction = base_prediction
        self.trees = trees
        self.edges = edges
        self.n_features = n_features

    def predict(self, X: Sequence[Sequence[float]]) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ShapeMismatchError(
                f"expected (n, {self.n_features}), got {X.shape}")
        binned = _apply_bins(X, self.edges)
        pred = np.full(X.shape[0], self.base_prediction)
        for tree in self.trees:
            pred += self.config.learning_rate * _predict_tree(tree, binned)
        return pred

    def max_leaf_magnitude(self) -> float:
        best = 0.0
        for tree in self.trees:
            stack = [tree]
            while stack:
                node = stack.pop()
                if node.is_leaf:
                    best = max(best, abs(node.value))
                else:
                    stack.extend((node.left, node.right))
        return best


def train_gbt(X: Sequence[Sequence[float]], y: Sequence[float],
              cfg: GbtConfig) -> Tuple[GbtModel, Metrics]:
    """Boost cfg.iterations residual trees over pre-binned features."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f"X {X.shape} does not align with y {y.shape}")
    if X.shape[0] < 2:
        raise ShapeMismatchError("need at least 2 samples")

    n, d = X.shape
    edges = [_bin_edges(X[:, f], cfg.max_bin) for f in range(d)]
    binned = _apply_bins(X, edges)
    n_bins = np.array([len(e) + 1 for e in edges])

    rng = np.random.default_rng(cfg.seed)
    n_pick = max(1, int(cfg.feature_fraction * d))
    base = float(y.mean())
    pred = np.full(n, base)
    trees: List[_Node] = []
    loss_curve: List[float] = []
    all_indices = np.arange(n)
    for _ in range(cfg.iterations):
        residual = y - pred
        features = np.sort(rng.choice(d, size=n_pick, replace=False))
        tree = _fit_tree(binned, residual, all_indices, features, n_bins, 0, cfg)
        trees.append(tree)
        pred = pred + cfg.learning_rate * _predict_tree(tree, binned)
        loss_curve.append(float(np.mean((y - pred) ** 2)))

    model = GbtModel(config=cfg, base_prediction=base, trees=trees,
                     edges=edges, n_features=d)
    metrics = metrics_or_error(pred, y, loss_curve=loss_curve)
    return model, metrics

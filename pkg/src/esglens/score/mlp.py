"""Small MLP regressor trained with adaptive-moment gradient descent.

Architecture: input -> hidden layers (rectifier) -> single identity output,
mean-squared-error loss, seeded shuffled mini-batches. Training is
single-threaded and bit-deterministic for a given (data, config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import NonFiniteLossError, ShapeMismatchError
from .metrics import Metrics, metrics_or_error

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class MlpConfig:
    input_dim: int = 3072
    hidden_dims: Tuple[int, ...] = (512, 512)
    epochs: int = 50
    learning_rate: float = 0.001
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if not self.hidden_dims:
            raise ValueError("hidden_dims must be non-empty")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


class MlpModel:
    """Weights plus forward pass; prediction stays in the training scale."""

    def __init__(self, config: MlpConfig, weights: List[np.ndarray],
                 biases: List[np.ndarray]):
        self.config = config
        self.weights = weights
        self.biases = biases

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.config.input_dim:
            raise ShapeMismatchError(
                f"expected (n, {self.config.input_dim}), got {X.shape}")
        activations, _ = _forward(X, self.weights, self.biases)
        return activations[-1][:, 0]


def _init_params(cfg: MlpConfig, rng: np.random.Generator):
    dims = [cfg.input_dim, *cfg.hidden_dims, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward(X: np.ndarray, weights, biases):
    """Returns layer activations (inputs first) and hidden pre-activations."""
    activations = [X]
    pre_acts = []
    a = X
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        pre_acts.append(z)
        a = z if i == last else np.maximum(z, 0.0)
        activations.append(a)
    return activations, pre_acts


def loss_and_gradients(X: np.ndarray, y: np.ndarray, weights, biases):
    """MSE loss and analytic gradients for every weight and bias."""
    n = X.shape[0]
    activations, pre_acts = _forward(X, weights, biases)
    pred = activations[-1][:, 0]
    diff = pred - y
    loss = float(np.mean(diff ** 2))
    grad_ws = [None] * len(weights)
    grad_bs = [None] * len(biases)
    delta = (2.0 * diff / n)[:, None]
    for i in range(len(weights) - 1, -1, -1):
        grad_ws[i] = activations[i].T @ delta
        grad_bs[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (pre_acts[i - 1] > 0.0)
    return loss, grad_ws, grad_bs


def train_mlp(X: Sequence[Sequence[float]], y: Sequence[float],
              cfg: MlpConfig) -> Tuple[MlpModel, Metrics]:
    """Train on scores scaled to [0, 1]; returns the model and its metrics.

    The per-epoch loss curve is the mean of mini-batch MSE losses. A
    non-finite loss aborts immediately with diagnostics rather than training
    onward from a diverged state.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f"X {X.shape} does not align with y {y.shape}")
    if X.shape[0] < 2:
        raise ShapeMismatchError("need at least 2 samples")
    if X.shape[1] != cfg.input_dim:
        raise ShapeMismatchError(
            f"X has {X.shape[1]} columns, config expects {cfg.input_dim}")

    rng = np.random.default_rng(cfg.seed)
    weights, biases = _init_params(cfg, rng)
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]

    n = X.shape[0]
    step = 0
    loss_curve = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        batch_losses = []
        for lo in range(0, n, cfg.batch_size):
            batch = order[lo:lo + cfg.batch_size]
            loss, grad_ws, grad_bs = loss_and_gradients(
                X[batch], y[batch], weights, biases)
            if not np.isfinite(loss):
                raise NonFiniteLossError(
                    f"loss diverged at epoch {epoch}, step {step}",
                    epoch=epoch, step=step)
            batch_losses.append(loss)
            step += 1
            correction1 = 1.0 - ADAM_BETA1 ** step
            correction2 = 1.0 - ADAM_BETA2 ** step
            for params, grads, ms, vs in (
                    (weights, grad_ws, m_w, v_w), (biases, grad_bs, m_b, v_b)):
                for i, grad in enumerate(grads):
                    ms[i] = ADAM_BETA1 * ms[i] + (1.0 - ADAM_BETA1) * grad
                    vs[i] = ADAM_BETA2 * vs[i] + (1.0 - ADAM_BETA2) * grad ** 2
                    m_hat = ms[i] / correction1
                    v_hat = vs[i] / correction2
                    params[i] = params[i] - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        loss_curve.append(float(np.mean(batch_losses)))

    model = MlpModel(config=cfg, weights=weights, biases=biases)
    metrics = metrics_or_error(model.predict(X), y, loss_curve=loss_curve)
    return model, metrics


def gradient_check(cfg: MlpConfig, n_samples: int = 10, seed: int = 0,
                   step: float = 1e-5) -> float:
    """Relative error between analytic and central-finite-difference gradients.

    Builds a random network and dataset, differentiates the full-batch loss
    with respect to every parameter and compares against (f(p+h)-f(p-h))/2h.
    """
    rng = np.random.default_rng(seed)
    weights, biases = _init_params(cfg, rng)
    # random biases keep pre-activations off the exact rectifier kink, where
    # a central difference would measure the average of the two slopes
    for b in biases:
        b += rng.normal(0.0, 0.1, size=b.shape)
    X = rng.normal(size=(n_samples, cfg.input_dim))
    y = rng.normal(size=n_samples)

    _, grad_ws, grad_bs = loss_and_gradients(X, y, weights, biases)
    analytic = np.concatenate(
        [g.ravel() for g in grad_ws] + [g.ravel() for g in grad_bs])

    def loss_at() -> float:
        loss, _, _ = loss_and_gradients(X, y, weights, biases)
        return loss

    numeric = np.empty_like(analytic)
    pos = 0
    for params in (weights, biases):
        for arr in params:
            flat = arr.ravel()
            for j in range(flat.size):
                original = flat[j]
                flat[j] = original + step
                up = loss_at()
                flat[j] = original - step
                down = loss_at()
                flat[j] = original
                numeric[pos] = (up - down) / (2.0 * step)
                pos += 1
    denom = np.linalg.norm(analytic) + np.linalg.norm(numeric) + 1e-12
    return float(np.linalg.norm(analytic - numeric) / denom)

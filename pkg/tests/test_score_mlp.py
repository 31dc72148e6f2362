"""MLP regressor: convergence, gradients, determinism."""

import numpy as np
import pytest

from esglens.errors import ShapeMismatchError
from esglens.score import MlpConfig, gradient_check, train_mlp
from esglens.score.metrics import pearson

SMALL = MlpConfig(input_dim=16, hidden_dims=(8, 8), epochs=5,
                  learning_rate=0.001, batch_size=4, seed=0)


def _planted_linear(n=500, dim=8, seed=3):
    """y is an exact linear function of two input columns, scaled to [0, 1]."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, dim))
    raw = 0.8 * X[:, 2] - 0.5 * X[:, 7]
    y = (raw - raw.min()) / (raw.max() - raw.min())
    return X, y


class TestTraining:
    def test_recovers_planted_linear_signal(self):
        X, y = _planted_linear()
        cfg = MlpConfig(input_dim=8, hidden_dims=(16,), epochs=150,
                        learning_rate=0.01, batch_size=32, seed=1)
        train_X, train_y = X[:400], y[:400]
        test_X, test_y = X[400:], y[400:]
        model, metrics = train_mlp(train_X, train_y, cfg)
        assert metrics.loss_curve[-1] < 1e-3
        held_out_r = pearson(model.predict(test_X), test_y)
        assert held_out_r > 0.99

    def test_constant_target_reports_error_code(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 16))
        y = np.full(40, 0.5)
        cfg = MlpConfig(input_dim=16, hidden_dims=(8, 8), epochs=120,
                        learning_rate=0.01, batch_size=8, seed=0)
        model, metrics = train_mlp(X, y, cfg)
        assert metrics.error_code == "ZERO_VARIANCE"
        assert metrics.pearson_r is None
        # the model still converges toward the constant
        assert np.all(np.abs(model.predict(X) - 0.5) < 0.05)

    def test_seed_determinism_bit_identical(self):
        X, y = _planted_linear(n=120)
        cfg = MlpConfig(input_dim=8, hidden_dims=(8, 8), epochs=8,
                        learning_rate=0.01, batch_size=16, seed=42)
        model_a, metrics_a = train_mlp(X, y, cfg)
        model_b, metrics_b = train_mlp(X, y, cfg)
        assert metrics_a.loss_curve == metrics_b.loss_curve
        np.testing.assert_array_equal(model_a.predict(X), model_b.predict(X))
        for wa, wb in zip(model_a.weights, model_b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_different_seed_differs(self):
        X, y = _planted_linear(n=60)
        cfg_a = MlpConfig(input_dim=8, hidden_dims=(8,), epochs=3, seed=1)
        cfg_b = MlpConfig(input_dim=8, hidden_dims=(8,), epochs=3, seed=2)
        _, metrics_a = train_mlp(X, y, cfg_a)
        _, metrics_b = train_mlp(X, y, cfg_b)
        assert metrics_a.loss_curve != metrics_b.loss_curve

    def test_shape_mismatches(self):
        X = np.zeros((10, 16))
        with pytest.raises(ShapeMismatchError):
            train_mlp(X, np.zeros(9), SMALL)
        with pytest.raises(ShapeMismatchError):
            train_mlp(np.zeros((10, 8)), np.zeros(10), SMALL)
        with pytest.raises(ShapeMismatchError):
            train_mlp(np.zeros((1, 16)), np.zeros(1), SMALL)

    def test_predict_validates_width(self):
        X, y = _planted_linear(n=50, dim=16)
        model, _ = train_mlp(X, y, SMALL)
        with pytest.raises(ShapeMismatchError):
            model.predict(np.zeros((3, 5)))


class TestGradients:
    def test_gradient_check_small_network(self):
        cfg = MlpConfig(input_dim=16, hidden_dims=(8, 8), seed=0)
        assert gradient_check(cfg, n_samples=10, seed=0) < 1e-4

    def test_gradient_check_various_shapes(self):
        for seed, hidden in [(1, (4,)), (2, (8, 4)), (3, (6, 6, 6))]:
            cfg = MlpConfig(input_dim=8, hidden_dims=hidden, seed=seed)
            assert gradient_check(cfg, n_samples=6, seed=seed) < 1e-4

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MlpConfig(input_dim=0)
        with pytest.raises(ValueError):
            MlpConfig(hidden_dims=())
        with pytest.raises(ValueError):
            MlpConfig(learning_rate=0.0)

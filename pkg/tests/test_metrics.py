"""Correlation metrics."""

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from esglens.errors import LengthMismatchError, ZeroVarianceError
from esglens.score import Metrics, evaluate
from esglens.score.metrics import metrics_or_error, pearson

from oracles.pearson_reference import reference_pearson

FOUR_POINT_PRED = [1.0, 2.0, 3.0, 4.0]
FOUR_POINT_TRUTH = [2.0, 4.0, 5.0, 4.0]


class TestEvaluate:
    def test_identity(self):
        m = evaluate([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert m.pearson_r == pytest.approx(1.0, abs=1e-12)
        assert m.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_anti_correlation(self):
        m = evaluate([1.0, 2.0, 3.0], [-1.0, -2.0, -3.0])
        assert m.pearson_r == pytest.approx(-1.0, abs=1e-12)

    def test_four_point_dataset_matches_oracle(self):
        m = evaluate(FOUR_POINT_PRED, FOUR_POINT_TRUTH)
        expected = reference_pearson(FOUR_POINT_PRED, FOUR_POINT_TRUTH)
        assert m.pearson_r == pytest.approx(expected, abs=1e-12)
        scipy_r = scipy.stats.pearsonr(FOUR_POINT_PRED, FOUR_POINT_TRUTH).statistic
        assert m.pearson_r == pytest.approx(scipy_r, abs=1e-12)

    def test_r_squared_is_squared_pearson(self):
        m = evaluate(FOUR_POINT_PRED, FOUR_POINT_TRUTH)
        assert m.r_squared == pytest.approx(m.pearson_r ** 2, abs=1e-12)
        # the definition reproduces the documented pairing of 0.48 with 0.2304
        assert 0.48 ** 2 == pytest.approx(0.2304, abs=1e-12)

    def test_zero_variance_truth(self):
        with pytest.raises(ZeroVarianceError):
            evaluate([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])

    def test_zero_variance_pred(self):
        with pytest.raises(ZeroVarianceError):
            evaluate([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])

    def test_error_code_variant(self):
        m = metrics_or_error([1.0, 1.0], [3.0, 3.0])
        assert m.pearson_r is None
        assert m.r_squared is None
        assert m.error_code == "ZERO_VARIANCE"

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            evaluate([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(LengthMismatchError):
            evaluate([], [])

    @settings(max_examples=60, deadline=None)
    @given(data=st.lists(
        st.tuples(st.floats(min_value=-100, max_value=100),
                  st.floats(min_value=-100, max_value=100)),
        min_size=3, max_size=40))
    def test_symmetry(self, data):
        xs = [a for a, _ in data]
        ys = [b for _, b in data]
        try:
            forward = pearson(xs, ys)
        except ZeroVarianceError:
            return  # degenerate inputs (incl. variance underflow) are out of domain
        assert forward == pytest.approx(pearson(ys, xs), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(data=st.lists(
        st.tuples(st.floats(min_value=-50, max_value=50),
                  st.floats(min_value=-50, max_value=50)),
        min_size=3, max_size=30))
    def test_agrees_with_reference_formula(self, data):
        xs = [a for a, _ in data]
        ys = [b for _, b in data]
        try:
            r = pearson(xs, ys)
        except ZeroVarianceError:
            return
        assert r == pytest.approx(reference_pearson(xs, ys), abs=1e-10)
        assert -1.0 - 1e-12 <= r <= 1.0 + 1e-12

"""Unit tests for the Adam optimizer."""

import numpy as np
import pytest

from s3t_decoder.errors import TrainingError
from s3t_decoder.numcore import AdamState, adam_step, parameter


def _params_with_grad(values, grad):
    tensor = parameter(values, name="w")
    tensor.grad = np.asarray(grad, dtype=np.float64)
    return {"w": tensor}


def test_first_step_moves_by_learning_rate():
    """Bias correction makes the first update lr * g / (|g| + eps)."""
    params = _params_with_grad([1.0, 1.0, 1.0], [0.5, -2.0, 1e-3])
    state = AdamState.for_params(params, learning_rate=0.1)
    adam_step(params, state)
    grad = np.array([0.5, -2.0, 1e-3])
    expected = 1.0 - 0.1 * grad / (np.abs(grad) + state.epsilon)
    np.testing.assert_allclose(params["w"].values, expected, rtol=1e-12)
    assert state.step_count == 1


def test_moments_follow_recurrence():
    params = _params_with_grad([0.0], [1.0])
    state = AdamState.for_params(params, beta1=0.5, beta2=0.9)
    adam_step(params, state)
    params["w"].grad = np.array([3.0])
    adam_step(params, state)
    np.testing.assert_allclose(state.first_moment["w"], [0.5 * 0.5 + 0.5 * 3.0])
    np.testing.assert_allclose(state.second_moment["w"], [0.9 * 0.1 + 0.1 * 9.0])


def test_zero_learning_rate_leaves_params():
    params = _params_with_grad([1.5, -2.5], [10.0, -3.0])
    state = AdamState.for_params(params, learning_rate=0.0)
    adam_step(params, state)
    np.testing.assert_array_equal(params["w"].values, [1.5, -2.5])


def test_missing_gradient_is_reported():
    params = {"w": parameter([1.0], name="w"), "b": parameter([0.0], name="b")}
    params["w"].grad = np.array([1.0])
    state = AdamState.for_params(params)
    with pytest.raises(TrainingError, match="b"):
        adam_step(params, state)
    assert state.step_count == 0


def test_zero_gradient_leaves_params_but_counts_the_step():
    params = _params_with_grad([0.3, -0.7], [0.0, 0.0])
    state = AdamState.for_params(params, learning_rate=0.1)
    adam_step(params, state)
    np.testing.assert_array_equal(params["w"].values, [0.3, -0.7])
    assert state.step_count == 1


def test_descends_a_quadratic_monotonically():
    params = _params_with_grad([1.0], [0.0])
    state = AdamState.for_params(params, learning_rate=1e-3)
    trajectory = [1.0]
    for _ in range(200):
        params["w"].grad = 2.0 * params["w"].values
        adam_step(params, state)
        trajectory.append(abs(float(params["w"].values[0])))
    assert all(later < earlier for earlier, later in zip(trajectory, trajectory[1:]))
    assert trajectory[-1] < 0.85
    assert state.step_count == 200

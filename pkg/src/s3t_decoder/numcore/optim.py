"""Adam optimizer with standard bias correction."""

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from s3t_decoder.config import constants
from s3t_decoder.errors import TrainingError
from s3t_decoder.numcore.tensor import DiffTensor


@dataclass
class AdamState:
    """First and second moment estimates for every parameter, keyed by name."""

    learning_rate: float = constants.LEARNING_RATE
    beta1: float = constants.BETA1
    beta2: float = constants.BETA2
    epsilon: float = constants.ADAM_EPS
    step_count: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: Mapping[str, DiffTensor], **settings) -> "AdamState":
        """Create a state with zeroed moments shaped like ``params``."""
        state = cls(**settings)
        for name, tensor in params.items():
            state.first_moment[name] = np.zeros(tensor.shape)
            state.second_moment[name] = np.zeros(tensor.shape)
        return state


def adam_step(
    params: Mapping[str, DiffTensor], state: AdamState
) -> tuple[Mapping[str, DiffTensor], AdamState]:
    """Apply one Adam update in place using the gradients stored on ``params``.

    Args:
        params: Trainable tensors keyed by name, each with a populated ``grad``
        state: Moment estimates; ``step_count`` is advanced by one

    Returns:
        The updated ``(params, state)`` pair

    Raises:
        TrainingError: If any parameter has no gradient
    """
    missing = [name for name, tensor in params.items() if tensor.grad is None]
    if missing:
        raise TrainingError(f"Missing gradient for parameter(s): {', '.join(missing)}")

    state.step_count += 1
    correction1 = 1.0 - state.beta1**state.step_count
    correction2 = 1.0 - state.beta2**state.step_count
    for name, tensor in params.items():
        grad = tensor.grad
        first = state.first_moment.setdefault(name, np.zeros(tensor.shape))
        second = state.second_moment.setdefault(name, np.zeros(tensor.shape))
        first *= state.beta1
        first += (1.0 - state.beta1) * grad
        second *= state.beta2
        second += (1.0 - state.beta2) * grad * grad
        step = (first / correction1) / (np.sqrt(second / correction2) + state.epsilon)
        tensor.values -= state.learning_rate * step
    return params, state

"""Central finite-difference oracle for analytic gradients."""

from collections.abc import Callable, Mapping

import numpy as np

from s3t_decoder.numcore.tensor import DiffTensor, backward, no_grad

DEFAULT_STEP = 1e-5
DEFAULT_COORDINATES = 10
# Below this magnitude both gradients are compared absolutely.
RELATIVE_FLOOR = 1e-6


def relative_error(analytic: float, numeric: float, floor: float = RELATIVE_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def check_gradients(
    loss_fn: Callable[[], DiffTensor],
    tensors: Mapping[str, DiffTensor],
    *,
    n_coordinates: int = DEFAULT_COORDINATES,
    step: float = DEFAULT_STEP,
    seed: int = 0,
) -> dict[str, float]:
    """Compare backward() against central differences at random coordinates.

    Args:
        loss_fn: Rebuilds the scalar loss from the current tensor values
        tensors: Leaves to check, keyed by name
        n_coordinates: Coordinates sampled per tensor (all of them if the tensor is smaller)
        step: Finite-difference half step
        seed: Seed for coordinate sampling

    Returns:
        Worst relative error per tensor name
    """
    for tensor in tensors.values():
        tensor.zero_grad()
    backward(loss_fn())
    analytic = {name: tensor.grad.copy() for name, tensor in tensors.items()}

    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    for name, tensor in tensors.items():
        count = min(n_coordinates, tensor.size)
        coordinates = rng.choice(tensor.size, size=count, replace=False)
        errors = []
        for index in coordinates:
            original = tensor.values.flat[index]
            with no_grad():
                tensor.values.flat[index] = original + step
                loss_plus = loss_fn().item()
                tensor.values.flat[index] = original - step
                loss_minus = loss_fn().item()
            tensor.values.flat[index] = original
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            errors.append(relative_error(analytic[name].flat[index], numeric))
        worst[name] = max(errors) if errors else 0.0
    return worst

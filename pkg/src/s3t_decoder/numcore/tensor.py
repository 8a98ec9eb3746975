"""Differentiable tensor and reverse-mode gradient propagation.

Every tensor produced by a differentiable operation remembers its parents and a
closure that maps the output gradient to one gradient per parent. Node ids are
handed out in creation order, so sorting the reachable nodes by descending id
replays the recorded tape backwards: a node is visited only after every
consumer has contributed to its gradient.
"""

import itertools
import threading
from collections.abc import Callable, Sequence
from contextlib import contextmanager

import numpy as np

from s3t_decoder.errors import GradientUsageError

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]

_node_ids = itertools.count()
_grad_mode = threading.local()


def is_grad_enabled() -> bool:
    """Whether operations on this thread currently record onto the tape."""
    return getattr(_grad_mode, "enabled", True)


@contextmanager
def no_grad():
    """Disable tape recording on the current thread for the duration of the block."""
    previous = is_grad_enabled()
    _grad_mode.enabled = False
    try:
        yield
    finally:
        _grad_mode.enabled = previous


class DiffTensor:
    """A float64 array that participates in reverse-mode differentiation."""

    def __init__(
        self,
        values,
        requires_grad: bool = False,
        *,
        name: str | None = None,
        _parents: tuple["DiffTensor", ...] = (),
        _backward: BackwardFn | None = None,
    ):
        self.values = np.asarray(values, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self.node_id = next(_node_ids)
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "DiffTensor":
        return DiffTensor(self.values)

    def numpy(self) -> np.ndarray:
        return self.values

    def item(self) -> float:
        return float(self.values.reshape(-1)[0])

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"DiffTensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    # Operator sugar; the implementations live in ops.
    def __add__(self, other):
        from s3t_decoder.numcore import ops

        return ops.add(self, other)

    def __radd__(self, other):
        from s3t_decoder.numcore import ops

        return ops.add(other, self)

    def __sub__(self, other):
        from s3t_decoder.numcore import ops

        return ops.sub(self, other)

    def __rsub__(self, other):
        from s3t_decoder.numcore import ops

        return ops.sub(other, self)

    def __mul__(self, other):
        from s3t_decoder.numcore import ops

        return ops.mul(self, other)

    def __rmul__(self, other):
        from s3t_decoder.numcore import ops

        return ops.mul(other, self)

    def __neg__(self):
        from s3t_decoder.numcore import ops

        return ops.mul(self, -1.0)

    def __matmul__(self, other):
        from s3t_decoder.numcore import ops

        return ops.matmul(self, other)


def parameter(values, name: str | None = None) -> DiffTensor:
    """Create a trainable leaf that owns a private copy of ``values``."""
    return DiffTensor(np.array(values, dtype=np.float64), requires_grad=True, name=name)


def constant(values) -> DiffTensor:
    """Wrap ``values`` as a leaf that never receives a gradient."""
    if isinstance(values, DiffTensor):
        return values
    return DiffTensor(values)


def record(
    values: np.ndarray, parents: Sequence[DiffTensor], backward_fn: BackwardFn
) -> DiffTensor:
    """Wrap an operation result, registering its gradient rule when needed."""
    parents = tuple(parents)
    if is_grad_enabled() and any(parent.requires_grad for parent in parents):
        return DiffTensor(values, requires_grad=True, _parents=parents, _backward=backward_fn)
    return DiffTensor(values)


def backward(loss: DiffTensor) -> None:
    """Populate ``grad`` on every tensor the scalar ``loss`` depends on.

    Gradients accumulate: calling backward twice without ``zero_grad`` sums them.

    Raises:
        GradientUsageError: If ``loss`` is not a scalar or was not recorded on a tape
    """
    if loss.size != 1:
        raise GradientUsageError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise GradientUsageError("Loss does not depend on any tensor that requires gradients")

    reachable: dict[int, DiffTensor] = {}
    stack = [loss]
    while stack:
        node = stack.pop()
        if node.node_id in reachable:
            continue
        reachable[node.node_id] = node
        stack.extend(parent for parent in node._parents if parent.requires_grad)

    pending: dict[int, np.ndarray] = {loss.node_id: np.ones_like(loss.values)}
    for node_id in sorted(reachable, reverse=True):
        node = reachable[node_id]
        upstream = pending.pop(node_id, None)
        if upstream is None:
            continue
        node.grad = upstream if node.grad is None else node.grad + upstream
        if node._backward is None:
            continue
        for parent, parent_grad in zip(node._parents, node._backward(upstream), strict=True):
            if parent_grad is None or not parent.requires_grad:
                continue
            if parent.node_id in pending:
                pending[parent.node_id] = pending[parent.node_id] + parent_grad
            else:
                pending[parent.node_id] = parent_grad

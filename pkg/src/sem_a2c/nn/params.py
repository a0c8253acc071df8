"""Trainable parameters: value + gradient accumulator + frozen flag.

A network is a plain ``dict[str, Parameter]`` keyed by dotted names
(``e_obs.conv1.w``, ``rnn_task.w1``, ...). That name set is the contract for
checkpoints and for selective freezing, so keep it stable.
"""

import math

import numpy as np


class DimensionError(ValueError):
    """Raised when tensor shapes are not conformable for an operation."""


class Parameter:
    """A trainable tensor with a same-shape gradient accumulator.

    Backward passes always accumulate into ``grad``, frozen or not; the
    frozen flag is honored by the optimizer, which must leave a frozen
    parameter's value bit-identical.
    """

    __slots__ = ("value", "grad", "frozen")

    def __init__(self, value, frozen=False):
        self.value = np.asarray(value)
        self.grad = np.zeros_like(self.value)
        self.frozen = bool(frozen)

    @property
    def shape(self):
        return self.value.shape

    @property
    def dtype(self):
        return self.value.dtype

    @property
    def size(self):
        return self.value.size

    def zero_grad(self):
        self.grad[...] = 0

    def __repr__(self):
        tag = ", frozen" if self.frozen else ""
        return f"Parameter(shape={tuple(self.shape)}, dtype={self.dtype}{tag})"


def uniform_init(rng, shape, fan_in, dtype):
    """Weight init: uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))."""
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


def zero_grads(params):
    for p in params.values():
        p.zero_grad()


def count_params(params, group_filter=None):
    """Count scalar weights, optionally restricted to a name group.

    ``group_filter`` may be None (everything), a dotted-name prefix, or a
    predicate on the full name.
    """
    if group_filter is None:
        pred = lambda name: True
    elif callable(group_filter):
        pred = group_filter
    else:
        prefix = str(group_filter)
        pred = lambda name: name == prefix or name.startswith(prefix + ".")
    return sum(p.size for name, p in params.items() if pred(name))


def global_grad_norm(params, include_frozen=False):
    total = 0.0
    for p in params.values():
        if p.frozen and not include_frozen:
            continue
        g = p.grad.ravel()
        total += float(g @ g)
    return math.sqrt(total)

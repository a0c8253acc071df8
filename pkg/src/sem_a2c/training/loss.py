"""Combined actor-critic loss over an unrolled chunk, with its backward pass.

loss = mean[-log pi(a) * A]                (A treated as a constant)
     + c_v  * mean[(R - v)^2]
     - c_e  * mean[entropy(pi)]
     + c_d  * mean[BCE(d_hat, d)]

The same code path serves training updates and finite-difference
verification: given recorded inputs, actions, returns and advantages, the
loss is a deterministic differentiable function of the parameters alone.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..nn import global_grad_norm

_TINY = 1e-30


@dataclass(frozen=True)
class LossWeights:
    value: float = 0.5
    entropy: float = 0.01
    completion: float = 0.5


def _replay_forward(net, chunk):
    outputs, state = [], chunk.initial_state.copy()
    dones = chunk.dones
    for t in range(chunk.actions.shape[0]):
        out, cache = net.forward(chunk.obs_grid[t], chunk.flags[t], chunk.tasks[t],
                                 chunk.d_prev[t], chunk.a_prev[t], state)
        state = out.state
        done_idx = np.flatnonzero(dones[t])
        if done_idx.size:
            state.reset_rows(done_idx)
        outputs.append((out, cache))
    return [o for o, _ in outputs], [c for _, c in outputs]


def a2c_loss_and_grads(net, chunk, returns, advantages, weights,
                       outputs=None, caches=None, backward=True):
    """Accumulate d(loss)/d(params) into net.params; return (loss, terms).

    outputs/caches from collection are reused when given (the parameters must
    not have changed since); otherwise the forward pass is replayed from
    chunk.initial_state. Episode boundaries cut the backward recursion the
    same way they cut the forward state.
    """
    if outputs is None or caches is None:
        outputs, caches = _replay_forward(net, chunk)

    t_len, n = chunk.actions.shape
    m = t_len * n
    adv = np.asarray(advantages, dtype=np.float64)
    ret = np.asarray(returns, dtype=np.float64)

    policy_term = value_term = entropy_term = completion_term = 0.0
    rows = np.arange(n)
    per_step_grads = []
    for t in range(t_len):
        out = outputs[t]
        pi = out.policy.astype(np.float64)
        logpi = np.log(np.maximum(pi, _TINY))
        a = chunk.actions[t]
        v = out.value.astype(np.float64)
        logit = out.comp_logit.astype(np.float64)
        d = chunk.d_target[t].astype(np.float64)

        policy_term += float(-(logpi[rows, a] * adv[t]).sum())
        value_term += float(((ret[t] - v) ** 2).sum())
        ent = -(pi * logpi).sum(axis=1)
        entropy_term += float(ent.sum())
        # binary cross-entropy on the completion logit, overflow-safe
        completion_term += float(
            (np.maximum(logit, 0.0) - logit * d + np.log1p(np.exp(-np.abs(logit)))).sum())

        if backward:
            onehot = np.zeros_like(pi)
            onehot[rows, a] = 1.0
            dlogits = (adv[t][:, None] * (pi - onehot)
                       + weights.entropy * pi * (logpi + ent[:, None])) / m
            dvalue = weights.value * 2.0 * (v - ret[t]) / m
            sig = 1.0 / (1.0 + np.exp(-logit))
            dcomp = weights.completion * (sig - d) / m
            per_step_grads.append((dlogits.astype(net.dtype),
                                   dvalue.astype(net.dtype),
                                   dcomp.astype(net.dtype)))

    loss = (policy_term
            + weights.value * value_term
            - weights.entropy * entropy_term
            + weights.completion * completion_term) / m
    terms = {
        "loss": loss,
        "policy_loss": policy_term / m,
        "value_loss": value_term / m,
        "entropy": entropy_term / m,
        "completion_loss": completion_term / m,
    }
    if not math.isfinite(loss):
        raise FloatingPointError(
            f"non-finite loss {terms}; parameter norms: "
            + ", ".join(f"{k}={np.linalg.norm(p.value):.3e}"
                        for k, p in net.params.items()))

    if backward:
        dstate = None
        for t in reversed(range(t_len)):
            if dstate is not None:
                mask = (1.0 - chunk.dones[t])[:, None].astype(net.dtype)
                dstate = tuple(g * mask for g in dstate)
            dlogits, dvalue, dcomp = per_step_grads[t]
            dstate = net.backward(caches[t], dlogits, dvalue, dcomp, dstate)

    return loss, terms

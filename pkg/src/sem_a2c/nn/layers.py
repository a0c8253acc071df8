"""Dense layers with explicit forward/backward passes.

Every forward returns ``(output, cache)`` and the matching backward consumes
that cache, accumulates into the Parameters' ``grad`` buffers and returns the
gradient w.r.t. its inputs. There is no tape: the network unroll records
caches per step and replays them in reverse (see models/ and training/).

Conventions: batch-first arrays; 1-D inputs are accepted where a single
sample makes sense and produce 1-D outputs. LSTM weights pack the four gates
row-wise in (i, f, o, g) order, so W has 4H rows and (input + H) columns;
this packing is part of the checkpoint contract.
"""

import numpy as np

from .. import kernels as K
from .params import DimensionError


def _as2d(x):
    x = np.asarray(x)
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim == 2:
        return x, False
    raise DimensionError(f"expected 1-D or 2-D input, got shape {x.shape}")


def sigmoid(x):
    return 0.5 * (np.tanh(0.5 * np.asarray(x)) + 1.0)


def softmax(logits):
    """Numerically stabilized softmax over the last axis."""
    logits = np.asarray(logits)
    if logits.size == 0:
        raise DimensionError("softmax of an empty vector")
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits):
    logits = np.asarray(logits)
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


# --- affine -----------------------------------------------------------------

def affine_forward(x, w, b):
    """y = x W^T + b with W of shape (out, in)."""
    x2, was1d = _as2d(x)
    if x2.shape[1] != w.shape[1]:
        raise DimensionError(
            f"affine: input shape {x2.shape} not conformable with weight shape {w.shape}"
        )
    y = x2 @ w.value.T + b.value
    return (y[0] if was1d else y), (x2, was1d)


def affine_backward(dy, cache, w, b):
    x2, was1d = cache
    dy2 = np.asarray(dy)
    if was1d:
        dy2 = dy2[None, :]
    w.grad += dy2.T @ x2
    b.grad += dy2.sum(axis=0)
    dx = dy2 @ w.value
    return dx[0] if was1d else dx


# --- two-layer convolutional observation encoder ----------------------------

def conv_stack_forward(x, w1, b1, w2, b2):
    """Two 3x3 same-padding conv layers with ReLU, flattened.

    x is (N, C, H, W); output is (N, F2*H*W). The channel count must match
    the first conv's weights.
    """
    x = np.asarray(x)
    if x.ndim != 4 or x.shape[1] != w1.shape[1]:
        raise DimensionError(
            f"conv stack configured for {w1.shape[1]} input channels, "
            f"got observation of shape {x.shape}"
        )
    a1 = K.conv3x3_forward(x, w1.value, b1.value)
    r1 = np.maximum(a1, 0)
    a2 = K.conv3x3_forward(r1, w2.value, b2.value)
    r2 = np.maximum(a2, 0)
    flat = r2.reshape(x.shape[0], -1)
    return flat, (x, a1, r1, a2)


def conv_stack_backward(dflat, cache, w1, b1, w2, b2):
    x, a1, r1, a2 = cache
    d2 = dflat.reshape(a2.shape) * (a2 > 0)
    dr1, dw2, db2 = K.conv3x3_backward(r1, w2.value, d2)
    w2.grad += dw2
    b2.grad += db2
    d1 = dr1 * (a1 > 0)
    dx, dw1, db1 = K.conv3x3_backward(x, w1.value, d1)
    w1.grad += dw1
    b1.grad += db1
    return dx


# --- LSTM cell ---------------------------------------------------------------

def lstm_forward(x, h_prev, c_prev, w, b):
    """One LSTM step. Returns ((h, c), cache).

    Gates: i, f, o through the logistic sigmoid, g through tanh;
    c_t = f*c_{t-1} + i*g, h_t = o*tanh(c_t).
    """
    x2, was1d = _as2d(x)
    h2d, _ = _as2d(h_prev)
    c2d, _ = _as2d(c_prev)
    hdim = h2d.shape[1]
    if w.shape[0] != 4 * hdim or w.shape[1] != x2.shape[1] + hdim:
        raise DimensionError(
            f"lstm: weight shape {w.shape} does not match input {x2.shape} "
            f"+ hidden {h2d.shape} (expected ({4 * hdim}, {x2.shape[1] + hdim}))"
        )
    xh = np.concatenate([x2, h2d], axis=1)
    pre = xh @ w.value.T + b.value
    h, c, gates = K.lstm_gates_forward(pre, c2d)
    cache = (xh, c2d, c, gates, x2.shape[1], was1d)
    if was1d:
        return (h[0], c[0]), cache
    return (h, c), cache


def lstm_backward(dh, dc, cache, w, b):
    """Backward of lstm_forward. Returns (dx, dh_prev, dc_prev)."""
    xh, c_prev, c, gates, in_dim, was1d = cache
    dh2 = np.asarray(dh)
    dc2 = np.asarray(dc)
    if was1d:
        dh2, dc2 = dh2[None, :], dc2[None, :]
    dpre, dc_prev = K.lstm_gates_backward(dh2, dc2, gates, c_prev, c)
    w.grad += dpre.T @ xh
    b.grad += dpre.sum(axis=0)
    dxh = dpre @ w.value
    dx, dh_prev = dxh[:, :in_dim], dxh[:, in_dim:]
    if was1d:
        return dx[0], dh_prev[0], dc_prev[0]
    return dx, dh_prev, dc_prev


# --- factorized LSTM ----------------------------------------------------------

def flstm_compose(v, w1, w2):
    """Materialize the per-task weight matrix W1 diag(v) W2."""
    v = np.asarray(v)
    if w1.shape[1] != v.shape[0] or w2.shape[0] != v.shape[0]:
        raise DimensionError(
            f"factorized compose: rank mismatch between W1 {w1.shape}, "
            f"v {v.shape} and W2 {w2.shape}"
        )
    return w1.value @ (v[:, None] * w2.value)


def flstm_compose_backward(dwg, v, w1, w2):
    """Accumulate grads of the composed matrix into W1, W2; return dv."""
    v = np.asarray(v)
    w1.grad += (dwg @ w2.value.T) * v[None, :]
    w2.grad += (w1.value.T @ dwg) * v[:, None]
    return ((w1.value.T @ dwg) * w2.value).sum(axis=1)


def flstm_forward(x, h_prev, c_prev, v_rows, w1, w2, b):
    """One factorized-LSTM step with per-sample conditioning vectors.

    Equivalent to materializing W = W1 diag(v) W2 and running lstm_forward,
    but fused: z = W2 [x,h]; pre = W1 (v * z) + b. v_rows is (N, rank), one
    conditioning vector per batch row, so rows of one batch may belong to
    different tasks.
    """
    x2, was1d = _as2d(x)
    h2d, _ = _as2d(h_prev)
    c2d, _ = _as2d(c_prev)
    v2d, _ = _as2d(v_rows)
    hdim = h2d.shape[1]
    rank = v2d.shape[1]
    if w1.shape != (4 * hdim, rank) or w2.shape != (rank, x2.shape[1] + hdim):
        raise DimensionError(
            f"factorized lstm: W1 {w1.shape} / W2 {w2.shape} do not match "
            f"input {x2.shape}, hidden {h2d.shape}, rank {rank}"
        )
    xh = np.concatenate([x2, h2d], axis=1)
    z = xh @ w2.value.T
    zv = z * v2d
    pre = zv @ w1.value.T + b.value
    h, c, gates = K.lstm_gates_forward(pre, c2d)
    cache = (xh, z, zv, v2d, c2d, c, gates, x2.shape[1], was1d)
    if was1d:
        return (h[0], c[0]), cache
    return (h, c), cache


def flstm_backward(dh, dc, cache, w1, w2, b):
    """Backward of flstm_forward. Returns (dx, dh_prev, dc_prev, dv_rows)."""
    xh, z, zv, v2d, c_prev, c, gates, in_dim, was1d = cache
    dh2 = np.asarray(dh)
    dc2 = np.asarray(dc)
    if was1d:
        dh2, dc2 = dh2[None, :], dc2[None, :]
    dpre, dc_prev = K.lstm_gates_backward(dh2, dc2, gates, c_prev, c)
    b.grad += dpre.sum(axis=0)
    w1.grad += dpre.T @ zv
    dzv = dpre @ w1.value
    dz = dzv * v2d
    dv_rows = dzv * z
    w2.grad += dz.T @ xh
    dxh = dz @ w2.value
    dx, dh_prev = dxh[:, :in_dim], dxh[:, in_dim:]
    if was1d:
        return dx[0], dh_prev[0], dc_prev[0], dv_rows[0]
    return dx, dh_prev, dc_prev, dv_rows

"""Pure-numpy reference implementations of the hot kernels.

Convolutions use im2col + BLAS, gate math uses vectorized expressions.
Shapes are batch-first throughout: x is (N, C, H, W), gate pre-activations
are (N, 4H) packed in (i, f, o, g) order.
"""

import numpy as np
from numpy.lib.stride_tricks import as_strided


def _sigmoid(x):
    # tanh form avoids overflow warnings for large |x|
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def _im2col(x):
    n, c, h, w = x.shape
    xp = np.zeros((n, c, h + 2, w + 2), dtype=x.dtype)
    xp[:, :, 1:-1, 1:-1] = x
    s = xp.strides
    win = as_strided(
        xp,
        shape=(n, h, w, c, 3, 3),
        strides=(s[0], s[2], s[3], s[1], s[2], s[3]),
    )
    return np.ascontiguousarray(win.reshape(n, h * w, c * 9))


def conv3x3_forward(x, w, b):
    """3x3 convolution, stride 1, zero padding 1. Returns (N, F, H, W)."""
    n, c, h, wid = x.shape
    f = w.shape[0]
    cols = _im2col(x)
    wmat = w.reshape(f, c * 9)
    y = cols @ wmat.T + b
    return y.reshape(n, h, wid, f).transpose(0, 3, 1, 2)


def conv3x3_backward(x, w, dy):
    """Gradients of conv3x3_forward. Returns (dx, dw, db)."""
    n, c, h, wid = x.shape
    f = w.shape[0]
    cols = _im2col(x)
    wmat = w.reshape(f, c * 9)
    dy_mat = dy.transpose(0, 2, 3, 1).reshape(n, h * wid, f)

    dw = np.tensordot(dy_mat, cols, axes=([0, 1], [0, 1])).reshape(w.shape)
    db = dy.sum(axis=(0, 2, 3))

    dcols = (dy_mat @ wmat).reshape(n, h, wid, c, 3, 3)
    dxp = np.zeros((n, c, h + 2, wid + 2), dtype=x.dtype)
    for ki in range(3):
        for kj in range(3):
            dxp[:, :, ki:ki + h, kj:kj + wid] += dcols[:, :, :, :, ki, kj].transpose(0, 3, 1, 2)
    return dxp[:, :, 1:-1, 1:-1], dw, db


def lstm_gates_forward(pre, c_prev):
    """Apply gate nonlinearities and the cell update.

    pre is (N, 4H) packed as (i, f, o, g); returns (h, c, gates) where gates
    holds the activated values in the same packing, kept for the backward pass.
    """
    hdim = c_prev.shape[1]
    i = _sigmoid(pre[:, :hdim])
    f = _sigmoid(pre[:, hdim:2 * hdim])
    o = _sigmoid(pre[:, 2 * hdim:3 * hdim])
    g = np.tanh(pre[:, 3 * hdim:])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    gates = np.concatenate([i, f, o, g], axis=1)
    return h, c, gates


def lstm_gates_backward(dh, dc_in, gates, c_prev, c):
    """Backward of lstm_gates_forward. Returns (dpre, dc_prev)."""
    hdim = c_prev.shape[1]
    i = gates[:, :hdim]
    f = gates[:, hdim:2 * hdim]
    o = gates[:, 2 * hdim:3 * hdim]
    g = gates[:, 3 * hdim:]

    tc = np.tanh(c)
    dc = dc_in + dh * o * (1.0 - tc * tc)
    di = dc * g
    df = dc * c_prev
    do = dh * tc
    dg = dc * i

    dpre = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            do * o * (1.0 - o),
            dg * (1.0 - g * g),
        ],
        axis=1,
    )
    return dpre, dc * f

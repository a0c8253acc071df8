"""Numba-compiled kernels. Same contracts as numpy_impl, direct loops.

At this problem size (7x7 grids, batches of ~16) the im2col round trip and
per-op numpy dispatch cost more than the arithmetic; plain compiled loops win.
Kernels are dtype-generic: numba specializes per float32/float64 call site.
"""

import math

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, fastmath=False)


@njit(**_JIT)
def conv3x3_forward(x, w, b):
    n, cin, h, wid = x.shape
    f = w.shape[0]
    y = np.empty((n, f, h, wid), x.dtype)
    for nn in range(n):
        for ff in range(f):
            for i in range(h):
                for j in range(wid):
                    acc = b[ff]
                    for c in range(cin):
                        for ki in range(3):
                            ii = i + ki - 1
                            if ii < 0 or ii >= h:
                                continue
                            for kj in range(3):
                                jj = j + kj - 1
                                if 0 <= jj < wid:
                                    acc += w[ff, c, ki, kj] * x[nn, c, ii, jj]
                    y[nn, ff, i, j] = acc
    return y


@njit(**_JIT)
def conv3x3_backward(x, w, dy):
    n, cin, h, wid = x.shape
    f = w.shape[0]
    dx = np.zeros(x.shape, x.dtype)
    dw = np.zeros(w.shape, w.dtype)
    db = np.zeros(f, w.dtype)
    for nn in range(n):
        for ff in range(f):
            for i in range(h):
                for j in range(wid):
                    g = dy[nn, ff, i, j]
                    db[ff] += g
                    for c in range(cin):
                        for ki in range(3):
                            ii = i + ki - 1
                            if ii < 0 or ii >= h:
                                continue
                            for kj in range(3):
                                jj = j + kj - 1
                                if 0 <= jj < wid:
                                    dw[ff, c, ki, kj] += g * x[nn, c, ii, jj]
                                    dx[nn, c, ii, jj] += g * w[ff, c, ki, kj]
    return dx, dw, db


@njit(**_JIT)
def lstm_gates_forward(pre, c_prev):
    n, h4 = pre.shape
    hdim = h4 // 4
    h = np.empty((n, hdim), pre.dtype)
    c = np.empty((n, hdim), pre.dtype)
    gates = np.empty((n, h4), pre.dtype)
    for nn in range(n):
        for k in range(hdim):
            gi = 0.5 * (math.tanh(0.5 * pre[nn, k]) + 1.0)
            gf = 0.5 * (math.tanh(0.5 * pre[nn, hdim + k]) + 1.0)
            go = 0.5 * (math.tanh(0.5 * pre[nn, 2 * hdim + k]) + 1.0)
            gg = math.tanh(pre[nn, 3 * hdim + k])
            ck = gf * c_prev[nn, k] + gi * gg
            gates[nn, k] = gi
            gates[nn, hdim + k] = gf
            gates[nn, 2 * hdim + k] = go
            gates[nn, 3 * hdim + k] = gg
            c[nn, k] = ck
            h[nn, k] = go * math.tanh(ck)
    return h, c, gates


@njit(**_JIT)
def lstm_gates_backward(dh, dc_in, gates, c_prev, c):
    n, hdim = c_prev.shape
    dpre = np.empty((n, 4 * hdim), dh.dtype)
    dc_prev = np.empty((n, hdim), dh.dtype)
    for nn in range(n):
        for k in range(hdim):
            gi = gates[nn, k]
            gf = gates[nn, hdim + k]
            go = gates[nn, 2 * hdim + k]
            gg = gates[nn, 3 * hdim + k]
            tc = math.tanh(c[nn, k])
            dc = dc_in[nn, k] + dh[nn, k] * go * (1.0 - tc * tc)
            dpre[nn, k] = dc * gg * gi * (1.0 - gi)
            dpre[nn, hdim + k] = dc * c_prev[nn, k] * gf * (1.0 - gf)
            dpre[nn, 2 * hdim + k] = dh[nn, k] * tc * go * (1.0 - go)
            dpre[nn, 3 * hdim + k] = dc * gi * (1.0 - gg * gg)
            dc_prev[nn, k] = dc * gf
    return dpre, dc_prev

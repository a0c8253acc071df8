"""Actor-critic networks.

``SemNet`` carries two recurrent modules: an episodic-memory LSTM that sees
only task-agnostic input and is zeroed at episode boundaries, and a
task-memory factorized LSTM whose weights are generated per task from an
embedding row and whose hidden state is multiplied by (1 - d_prev), i.e.
cleared whenever the previous step completed a sub-task. Both hidden vectors
feed three affine heads: action logits, state value, completion logit.

``SingleRnnNet`` is the single-memory baseline in two variants: ``concat``
appends the task embedding to the LSTM input; ``factorized`` conditions the
LSTM weights on it instead, exactly like the task module above. The
baseline's hidden size defaults to the parameter-parity solution so its
total weight count lands within 10% of the two-module network.

All forward passes are batch-first and pure; caches returned by forward feed
the matching explicit backward. The per-step cell state gating and resets
apply to both h and c: clearing only h would leave memory in the cell.
"""

from dataclasses import dataclass

import numpy as np

from ..nn import (
    Parameter,
    affine_backward,
    affine_forward,
    conv_stack_backward,
    conv_stack_forward,
    count_params,
    flstm_backward,
    flstm_forward,
    lstm_backward,
    lstm_forward,
    sigmoid,
    softmax,
    uniform_init,
)

MODEL_NAMES = ("sem", "baseline_concat", "baseline_factorized", "multitask")


@dataclass(frozen=True)
class ModelConfig:
    n_channels: int = 6
    view: int = 7
    n_flags: int = 2
    n_actions: int = 6
    n_tasks: int = 7
    embed_dim: int = 32
    conv1_filters: int = 16
    conv2_filters: int = 32
    sem_hidden: int = 128
    tsm_hidden: int = 128
    baseline_hidden: int = 0  # 0: solve for parameter parity with the sem model

    @property
    def conv_flat(self):
        return self.conv2_filters * self.view * self.view

    @property
    def base_input(self):
        # [conv features, carrying flags, d_prev, a_prev one-hot]
        return self.conv_flat + self.n_flags + 1 + self.n_actions


@dataclass
class AgentState:
    """Hidden/cell pairs of the episodic and task memories, batch rows."""
    h_sem: np.ndarray
    c_sem: np.ndarray
    h_tsm: np.ndarray
    c_tsm: np.ndarray

    def reset_rows(self, idx):
        for a in (self.h_sem, self.c_sem, self.h_tsm, self.c_tsm):
            a[idx] = 0

    def copy(self):
        return AgentState(self.h_sem.copy(), self.c_sem.copy(),
                          self.h_tsm.copy(), self.c_tsm.copy())


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray

    def reset_rows(self, idx):
        self.h[idx] = 0
        self.c[idx] = 0

    def copy(self):
        return LstmState(self.h.copy(), self.c.copy())


@dataclass
class ForwardOutput:
    policy: np.ndarray      # (N, n_actions), rows sum to 1
    value: np.ndarray       # (N,)
    comp_prob: np.ndarray   # (N,) in [0, 1]
    state: object           # next recurrent state
    comp_logit: np.ndarray = None  # (N,) pre-sigmoid, kept for the BCE loss


def reset_episode(state):
    """Zeroed copy of a recurrent state, for episode boundaries."""
    out = state.copy()
    out.reset_rows(slice(None))
    return out


def _conv_params(cfg, rng, dtype, params):
    c, f1, f2 = cfg.n_channels, cfg.conv1_filters, cfg.conv2_filters
    params["e_obs.conv1.w"] = Parameter(uniform_init(rng, (f1, c, 3, 3), c * 9, dtype))
    params["e_obs.conv1.b"] = Parameter(np.zeros(f1, dtype))
    params["e_obs.conv2.w"] = Parameter(uniform_init(rng, (f2, f1, 3, 3), f1 * 9, dtype))
    params["e_obs.conv2.b"] = Parameter(np.zeros(f2, dtype))


def _head_params(cfg, rng, dtype, params, in_dim):
    for name, out_dim in (("f_pol", cfg.n_actions), ("f_val", 1), ("f_comp", 1)):
        params[f"{name}.w"] = Parameter(uniform_init(rng, (out_dim, in_dim), in_dim, dtype))
        params[f"{name}.b"] = Parameter(np.zeros(out_dim, dtype))


def _encode_input(net, obs_grid, flags, d_prev, a_prev):
    """[conv(obs), carrying flags, d_prev, a_prev] in the network's dtype."""
    p = net.params
    conv_flat, conv_cache = conv_stack_forward(
        obs_grid.astype(net.dtype, copy=False),
        p["e_obs.conv1.w"], p["e_obs.conv1.b"],
        p["e_obs.conv2.w"], p["e_obs.conv2.b"])
    o_hat = np.concatenate(
        [conv_flat,
         flags.astype(net.dtype, copy=False),
         d_prev.astype(net.dtype, copy=False)[:, None],
         a_prev.astype(net.dtype, copy=False)],
        axis=1)
    return o_hat, conv_cache


class SemNet:
    name = "sem"

    def __init__(self, cfg=ModelConfig(), dtype=np.float32, seed=0):
        self.cfg = cfg
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)
        p = {}
        _conv_params(cfg, rng, self.dtype, p)
        p["e_task.embed"] = Parameter(
            uniform_init(rng, (cfg.n_tasks, cfg.embed_dim), cfg.embed_dim, self.dtype))
        env_cols = cfg.base_input + cfg.sem_hidden
        p["rnn_env.w"] = Parameter(
            uniform_init(rng, (4 * cfg.sem_hidden, env_cols), env_cols, self.dtype))
        p["rnn_env.b"] = Parameter(np.zeros(4 * cfg.sem_hidden, self.dtype))
        task_cols = cfg.base_input + cfg.sem_hidden + cfg.tsm_hidden
        p["rnn_task.w1"] = Parameter(
            uniform_init(rng, (4 * cfg.tsm_hidden, cfg.embed_dim), cfg.embed_dim, self.dtype))
        p["rnn_task.w2"] = Parameter(
            uniform_init(rng, (cfg.embed_dim, task_cols), task_cols, self.dtype))
        p["rnn_task.b"] = Parameter(np.zeros(4 * cfg.tsm_hidden, self.dtype))
        _head_params(cfg, rng, self.dtype, p, cfg.sem_hidden + cfg.tsm_hidden)
        self.params = p

    def init_state(self, n):
        cfg = self.cfg
        return AgentState(
            np.zeros((n, cfg.sem_hidden), self.dtype),
            np.zeros((n, cfg.sem_hidden), self.dtype),
            np.zeros((n, cfg.tsm_hidden), self.dtype),
            np.zeros((n, cfg.tsm_hidden), self.dtype),
        )

    def forward(self, obs_grid, flags, task_ids, d_prev, a_prev, state):
        """One step of the network. Returns (ForwardOutput, cache).

        task_ids is an int array (N,); d_prev in {0,1}; a_prev a one-hot
        (N, n_actions), all-zero on the first step of an episode.
        """
        cfg, p = self.cfg, self.params
        if np.any(task_ids < 0) or np.any(task_ids >= cfg.n_tasks):
            raise LookupError(f"task id out of range 0..{cfg.n_tasks - 1}: {task_ids}")
        o_hat, conv_cache = _encode_input(self, obs_grid, flags, d_prev, a_prev)

        (h_sem, c_sem), env_cache = lstm_forward(
            o_hat, state.h_sem, state.c_sem, p["rnn_env.w"], p["rnn_env.b"])

        # task memory cleared by the previous step's completion signal
        gate = (1.0 - d_prev.astype(self.dtype))[:, None]
        h_hat = state.h_tsm * gate
        c_hat = state.c_tsm * gate
        x_task = np.concatenate([o_hat, h_sem], axis=1)
        v_rows = p["e_task.embed"].value[task_ids]
        (h_tsm, c_tsm), task_cache = flstm_forward(
            x_task, h_hat, c_hat, v_rows,
            p["rnn_task.w1"], p["rnn_task.w2"], p["rnn_task.b"])

        hh = np.concatenate([h_sem, h_tsm], axis=1)
        logits, pol_cache = affine_forward(hh, p["f_pol.w"], p["f_pol.b"])
        value, val_cache = affine_forward(hh, p["f_val.w"], p["f_val.b"])
        comp_logit, comp_cache = affine_forward(hh, p["f_comp.w"], p["f_comp.b"])

        out = ForwardOutput(
            policy=softmax(logits),
            value=value[:, 0],
            comp_prob=sigmoid(comp_logit[:, 0]),
            state=AgentState(h_sem, c_sem, h_tsm, c_tsm),
            comp_logit=comp_logit[:, 0],
        )
        cache = (conv_cache, env_cache, task_cache, pol_cache, val_cache,
                 comp_cache, task_ids, gate, cfg.base_input)
        return out, cache

    def backward(self, cache, dlogits, dvalue, dcomp_logit, dstate=None):
        """Accumulate parameter grads for one step; return the gradient
        w.r.t. the incoming state as a (dh_sem, dc_sem, dh_tsm, dc_tsm) tuple.

        dstate chains BPTT from the following step; the completion gate is a
        constant, so the task-memory gradient is masked by it on the way out.
        """
        (conv_cache, env_cache, task_cache, pol_cache, val_cache, comp_cache,
         task_ids, gate, base_input) = cache
        p = self.params

        d_hh = affine_backward(dlogits, pol_cache, p["f_pol.w"], p["f_pol.b"])
        d_hh = d_hh + affine_backward(dvalue[:, None], val_cache, p["f_val.w"], p["f_val.b"])
        d_hh = d_hh + affine_backward(dcomp_logit[:, None], comp_cache,
                                      p["f_comp.w"], p["f_comp.b"])

        hdim = self.cfg.sem_hidden
        dh_sem = d_hh[:, :hdim].copy()
        dh_tsm = d_hh[:, hdim:].copy()
        dc_sem = np.zeros_like(dh_sem)
        dc_tsm = np.zeros_like(dh_tsm)
        if dstate is not None:
            dh_sem += dstate[0]
            dc_sem += dstate[1]
            dh_tsm += dstate[2]
            dc_tsm += dstate[3]

        dx_task, dh_hat, dc_hat, dv_rows = flstm_backward(
            dh_tsm, dc_tsm, task_cache,
            p["rnn_task.w1"], p["rnn_task.w2"], p["rnn_task.b"])
        np.add.at(p["e_task.embed"].grad, task_ids, dv_rows)
        d_o_hat = dx_task[:, :base_input]
        dh_sem = dh_sem + dx_task[:, base_input:]

        d_o_hat2, dh_sem_prev, dc_sem_prev = lstm_backward(
            dh_sem, dc_sem, env_cache, p["rnn_env.w"], p["rnn_env.b"])
        d_o_hat = d_o_hat + d_o_hat2

        d_conv = d_o_hat[:, :self.cfg.conv_flat]
        conv_stack_backward(d_conv, conv_cache,
                            p["e_obs.conv1.w"], p["e_obs.conv1.b"],
                            p["e_obs.conv2.w"], p["e_obs.conv2.b"])

        return (dh_sem_prev, dc_sem_prev, dh_hat * gate, dc_hat * gate)


class SingleRnnNet:
    """Single-LSTM baseline; task conditioning by input concat or weight
    factorization. Hidden state is zeroed only at episode boundaries."""

    def __init__(self, cfg=ModelConfig(), variant="concat", dtype=np.float32, seed=0):
        if variant not in ("concat", "factorized"):
            raise ValueError(f"unknown baseline variant {variant!r}")
        self.cfg = cfg
        self.variant = variant
        self.name = f"baseline_{variant}"
        self.dtype = np.dtype(dtype)
        hidden = cfg.baseline_hidden or solve_baseline_hidden(cfg)
        self.hidden = hidden
        rng = np.random.default_rng(seed)
        p = {}
        _conv_params(cfg, rng, self.dtype, p)
        p["e_task.embed"] = Parameter(
            uniform_init(rng, (cfg.n_tasks, cfg.embed_dim), cfg.embed_dim, self.dtype))
        if variant == "concat":
            cols = cfg.base_input + cfg.embed_dim + hidden
            p["rnn.w"] = Parameter(uniform_init(rng, (4 * hidden, cols), cols, self.dtype))
        else:
            cols = cfg.base_input + hidden
            p["rnn.w1"] = Parameter(
                uniform_init(rng, (4 * hidden, cfg.embed_dim), cfg.embed_dim, self.dtype))
            p["rnn.w2"] = Parameter(uniform_init(rng, (cfg.embed_dim, cols), cols, self.dtype))
        p["rnn.b"] = Parameter(np.zeros(4 * hidden, self.dtype))
        _head_params(cfg, rng, self.dtype, p, hidden)
        self.params = p

    def init_state(self, n):
        return LstmState(np.zeros((n, self.hidden), self.dtype),
                         np.zeros((n, self.hidden), self.dtype))

    def forward(self, obs_grid, flags, task_ids, d_prev, a_prev, state):
        cfg, p = self.cfg, self.params
        if np.any(task_ids < 0) or np.any(task_ids >= cfg.n_tasks):
            raise LookupError(f"task id out of range 0..{cfg.n_tasks - 1}: {task_ids}")
        o_hat, conv_cache = _encode_input(self, obs_grid, flags, d_prev, a_prev)
        v_rows = p["e_task.embed"].value[task_ids]

        if self.variant == "concat":
            x = np.concatenate([o_hat, v_rows], axis=1)
            (h, c), rnn_cache = lstm_forward(x, state.h, state.c, p["rnn.w"], p["rnn.b"])
        else:
            (h, c), rnn_cache = flstm_forward(
                o_hat, state.h, state.c, v_rows, p["rnn.w1"], p["rnn.w2"], p["rnn.b"])

        logits, pol_cache = affine_forward(h, p["f_pol.w"], p["f_pol.b"])
        value, val_cache = affine_forward(h, p["f_val.w"], p["f_val.b"])
        comp_logit, comp_cache = affine_forward(h, p["f_comp.w"], p["f_comp.b"])
        out = ForwardOutput(
            policy=softmax(logits),
            value=value[:, 0],
            comp_prob=sigmoid(comp_logit[:, 0]),
            state=LstmState(h, c),
            comp_logit=comp_logit[:, 0],
        )
        cache = (conv_cache, rnn_cache, pol_cache, val_cache, comp_cache,
                 task_ids, cfg.base_input)
        return out, cache

    def backward(self, cache, dlogits, dvalue, dcomp_logit, dstate=None):
        (conv_cache, rnn_cache, pol_cache, val_cache, comp_cache,
         task_ids, base_input) = cache
        p = self.params

        dh = affine_backward(dlogits, pol_cache, p["f_pol.w"], p["f_pol.b"])
        dh = dh + affine_backward(dvalue[:, None], val_cache, p["f_val.w"], p["f_val.b"])
        dh = dh + affine_backward(dcomp_logit[:, None], comp_cache,
                                  p["f_comp.w"], p["f_comp.b"])
        dc = np.zeros_like(dh)
        if dstate is not None:
            dh = dh + dstate[0]
            dc = dc + dstate[1]

        if self.variant == "concat":
            dx, dh_prev, dc_prev = lstm_backward(dh, dc, rnn_cache, p["rnn.w"], p["rnn.b"])
            d_o_hat = dx[:, :base_input]
            np.add.at(p["e_task.embed"].grad, task_ids, dx[:, base_input:])
        else:
            d_o_hat, dh_prev, dc_prev, dv_rows = flstm_backward(
                dh, dc, rnn_cache, p["rnn.w1"], p["rnn.w2"], p["rnn.b"])
            np.add.at(p["e_task.embed"].grad, task_ids, dv_rows)

        conv_stack_backward(d_o_hat[:, :self.cfg.conv_flat], conv_cache,
                            p["e_obs.conv1.w"], p["e_obs.conv1.b"],
                            p["e_obs.conv2.w"], p["e_obs.conv2.b"])
        return (dh_prev, dc_prev)


def _sem_total(cfg):
    conv = (cfg.conv1_filters * cfg.n_channels * 9 + cfg.conv1_filters
            + cfg.conv2_filters * cfg.conv1_filters * 9 + cfg.conv2_filters)
    embed = cfg.n_tasks * cfg.embed_dim
    env = 4 * cfg.sem_hidden * (cfg.base_input + cfg.sem_hidden) + 4 * cfg.sem_hidden
    task_cols = cfg.base_input + cfg.sem_hidden + cfg.tsm_hidden
    task = (4 * cfg.tsm_hidden * cfg.embed_dim + cfg.embed_dim * task_cols
            + 4 * cfg.tsm_hidden)
    heads = (cfg.n_actions + 2) * (cfg.sem_hidden + cfg.tsm_hidden) + cfg.n_actions + 2
    return conv + embed + env + task + heads


def _concat_total(cfg, hidden):
    conv = (cfg.conv1_filters * cfg.n_channels * 9 + cfg.conv1_filters
            + cfg.conv2_filters * cfg.conv1_filters * 9 + cfg.conv2_filters)
    embed = cfg.n_tasks * cfg.embed_dim
    cols = cfg.base_input + cfg.embed_dim + hidden
    rnn = 4 * hidden * cols + 4 * hidden
    heads = (cfg.n_actions + 2) * hidden + cfg.n_actions + 2
    return conv + embed + rnn + heads


def solve_baseline_hidden(cfg):
    """Hidden size for the single-LSTM baseline that matches the two-module
    network's total parameter count as closely as possible."""
    target = _sem_total(cfg)
    best_h, best_gap = 1, float("inf")
    lo, hi = 1, 4 * (cfg.sem_hidden + cfg.tsm_hidden) + 64
    for h in range(lo, hi):
        gap = abs(_concat_total(cfg, h) - target)
        if gap < best_gap:
            best_h, best_gap = h, gap
    return best_h


def make_model(name, cfg=ModelConfig(), dtype=np.float32, seed=0):
    """Model zoo lookup. 'multitask' shares the concat baseline architecture;
    the training procedure difference lives in the trainer."""
    if name == "sem":
        return SemNet(cfg, dtype=dtype, seed=seed)
    if name in ("baseline_concat", "multitask"):
        return SingleRnnNet(cfg, "concat", dtype=dtype, seed=seed)
    if name == "baseline_factorized":
        return SingleRnnNet(cfg, "factorized", dtype=dtype, seed=seed)
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")

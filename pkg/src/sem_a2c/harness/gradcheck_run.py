"""End-to-end gradient verification of a full model.

Builds the requested architecture in float64, collects a short seeded
rollout, and runs central finite differences on the combined training loss
against the analytic backward pass, sampling entries from every parameter
group. Parameters are jittered away from their initialization first: with
zero biases and 0/1 observation grids, many ReLU pre-activations sit exactly
on the kink, where a difference quotient is meaningless.
"""

import numpy as np

from ..env import EnvConfig
from ..models import ModelConfig, make_model
from ..nn import grad_check, zero_grads
from ..training import Collector, LossWeights, VecTaxi, a2c_loss_and_grads, compute_returns


def full_model_grad_check(model="sem", seed=0, n_steps=3, n_workers=2,
                          max_entries=25, map_size=8, episode_len=60,
                          model_cfg=None, eps=1e-5):
    model_cfg = model_cfg or ModelConfig()
    net = make_model(model, model_cfg, dtype=np.float64, seed=seed)
    jitter = np.random.default_rng(seed + 1)
    for p in net.params.values():
        p.value += jitter.uniform(-0.1, 0.1, size=p.shape)

    venv = VecTaxi(n_workers, EnvConfig(map_size, map_size, episode_len), seed + 2)
    collector = Collector(venv, net, np.random.default_rng(seed + 3))
    chunk = collector.collect(n_steps)
    returns = compute_returns(chunk.rewards, chunk.dones, chunk.bootstrap, 0.99)
    advantages = returns - chunk.values
    weights = LossWeights()

    def f(params):
        zero_grads(params)
        loss, _ = a2c_loss_and_grads(net, chunk, returns, advantages, weights)
        return loss

    return grad_check(f, net.params, eps=eps, max_entries=max_entries,
                      rng=np.random.default_rng(seed + 4))

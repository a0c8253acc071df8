"""Training orchestration: synchronous advantage actor-critic over parallel
environments, plus the continual-learning freeze for the cargo stage.

Each iteration collects an n-step chunk from every worker against the current
parameters, computes masked discounted returns, accumulates the combined loss
gradient through the recorded unroll and applies one RMSProp update. Hidden
states carry across chunks within an episode but gradients do not (truncated
backpropagation through time).
"""

import json
import math
import time

import numpy as np

from ..env import ALL_TASKS, EnvConfig, TaskId
from ..models import ModelConfig, make_model
from ..nn import zero_grads
from .config import TrainConfig, parse_tasks
from .loss import LossWeights, a2c_loss_and_grads
from .optim import RMSProp
from .returns import compute_returns
from .rollout import Collector, VecTaxi

# parameter groups that stay trainable during the cargo fine-tuning stage
CONTINUAL_TRAINABLE = ("f_pol", "f_val", "f_comp", "e_task")


def trainable_group_names(params):
    return sorted(name for name, p in params.items() if not p.frozen)


def continual_freeze(params):
    """Freeze every layer except the output heads and the task embeddings."""
    for name, p in params.items():
        p.frozen = not name.startswith(CONTINUAL_TRAINABLE)
    return trainable_group_names(params)


class Trainer:
    def __init__(self, cfg, model_cfg=None, net=None, log_path=None, verbose=False):
        self.cfg = cfg
        self.model_cfg = model_cfg or ModelConfig()
        s_net, s_env, s_act = np.random.SeedSequence(cfg.seed).generate_state(3)
        self.net = net if net is not None else make_model(
            cfg.model, self.model_cfg, seed=int(s_net))
        env_cfg = EnvConfig(
            cfg.map_size, cfg.map_size, cfg.episode_len, tasks=cfg.tasks,
            single_task=(cfg.model == "multitask"))
        self.venv = VecTaxi(cfg.n_workers, env_cfg, int(s_env))
        self.collector = Collector(self.venv, self.net,
                                   np.random.default_rng(int(s_act)))
        self.opt = RMSProp(self.net.params, cfg.learning_rate, cfg.rmsprop_decay,
                           cfg.rmsprop_eps, cfg.grad_clip_norm)
        self.weights = LossWeights(cfg.value_loss_weight, cfg.entropy_weight,
                                   cfg.completion_loss_weight)
        self.log_records = []
        self.log_path = log_path
        self.verbose = verbose

    @property
    def env_steps(self):
        return self.collector.total_steps

    def train(self, max_iterations=None):
        cfg = self.cfg
        steps_per_iter = cfg.n_workers * cfg.n_steps
        n_iters = math.ceil(cfg.total_env_steps / steps_per_iter)
        if max_iterations is not None:
            n_iters = min(n_iters, max_iterations)
        t0 = time.monotonic()
        log_fh = open(self.log_path, "a") if self.log_path else None
        try:
            for it in range(1, n_iters + 1):
                chunk = self.collector.collect(cfg.n_steps)
                returns = compute_returns(chunk.rewards, chunk.dones,
                                          chunk.bootstrap, cfg.gamma)
                advantages = returns - chunk.values
                zero_grads(self.net.params)
                _, terms = a2c_loss_and_grads(
                    self.net, chunk, returns, advantages, self.weights,
                    outputs=chunk.outputs, caches=chunk.caches)
                grad_norm = self.opt.step(self.net.params)

                if it % cfg.log_interval == 0 or it == n_iters:
                    record = self._log_record(it, terms, grad_norm, t0)
                    self.log_records.append(record)
                    if log_fh:
                        log_fh.write(json.dumps(record) + "\n")
                        log_fh.flush()
                    if self.verbose:
                        self._print_progress(record)
                    if self._early_stop(record):
                        break
        finally:
            if log_fh:
                log_fh.close()
        return self.log_records

    def _log_record(self, it, terms, grad_norm, t0):
        stats = self.collector.pop_stats()
        success = {}
        attempts = {}
        for t in self.cfg.tasks:
            s = stats["success"].get(int(t), 0)
            f = stats["failure"].get(int(t), 0)
            attempts[t.name.lower()] = s + f
            success[t.name.lower()] = (s / (s + f)) if s + f else None
        returns = stats["episode_returns"]
        record = {
            "step": self.env_steps,
            "iter": it,
            "mean_return": (float(np.mean(returns)) if returns else None),
            "episodes": len(returns),
            "grad_norm": float(grad_norm),
            "success": success,
            "attempts": attempts,
        }
        record.update({k: float(v) for k, v in terms.items()})
        record["wall_clock"] = time.monotonic() - t0
        return record

    def _print_progress(self, rec):
        rates = " ".join(f"{k}={v:.2f}" if v is not None else f"{k}=-"
                         for k, v in rec["success"].items())
        ret = f"{rec['mean_return']:+.1f}" if rec["mean_return"] is not None else "-"
        print(f"[{rec['step']:>9d}] loss={rec['loss']:+.4f} return={ret} {rates}",
              flush=True)

    def _early_stop(self, record):
        thr = self.cfg.early_stop_success
        if not thr:
            return False
        for name in self.cfg.task_names:
            rate = record["success"][name]
            if record["attempts"][name] < 10 or rate is None or rate < thr:
                return False
        return True


def finetune_continual(net, pretrain_tasks, cfg):
    """Cargo-stage fine-tuning: heads and task embeddings only.

    The pretrained model must already know the cargo object by sight, i.e.
    its task set must include reach_c. Returns (net, log_records, trainables).
    """
    pretrain_tasks = parse_tasks(pretrain_tasks) if not all(
        isinstance(t, TaskId) for t in pretrain_tasks) else tuple(pretrain_tasks)
    if TaskId.REACH_C not in pretrain_tasks:
        raise ValueError(
            "pretraining task set lacks reach_c; the observation encoder has "
            "never seen the cargo object and cannot be frozen into the task")
    trainables = continual_freeze(net.params)
    if tuple(cfg.tasks) != ALL_TASKS:
        cfg = TrainConfig(**{**cfg.__dict__, "tasks": "all7"})
    trainer = Trainer(cfg, net=net)
    log = trainer.train()
    return net, log, trainables

"""Run configuration, loadable from a JSON document.

Defaults follow standard recurrent A2C practice; none of the loss weights,
the optimizer, the unroll length or the worker count are dictated by the
method itself, so report them with any results.
"""

import dataclasses
import json
from dataclasses import dataclass

from ..env import ALL_TASKS, PRETRAIN_TASKS, TAXI_TASKS, TaskId

TASK_ALIASES = {
    "taxi4": TAXI_TASKS,
    "pretrain5": PRETRAIN_TASKS,
    "all7": ALL_TASKS,
}

_TASK_BY_NAME = {t.name.lower(): t for t in TaskId}


def parse_tasks(spec):
    """Accept an alias string ('taxi4', 'pretrain5', 'all7'), a list of task
    names ('reach_p', ...), or a list of integer codes."""
    if isinstance(spec, str):
        if spec in TASK_ALIASES:
            return TASK_ALIASES[spec]
        raise ValueError(
            f"unknown task alias {spec!r}; valid: {sorted(TASK_ALIASES)}")
    out = []
    for item in spec:
        if isinstance(item, str):
            key = item.lower()
            if key not in _TASK_BY_NAME:
                raise ValueError(
                    f"unknown task {item!r}; valid: {sorted(_TASK_BY_NAME)}")
            out.append(_TASK_BY_NAME[key])
        else:
            out.append(TaskId(item))
    return tuple(out)


@dataclass
class TrainConfig:
    model: str = "sem"
    tasks: object = "taxi4"
    map_size: int = 15
    episode_len: int = 400          # steps per episode (T)
    n_workers: int = 16
    n_steps: int = 20               # unroll length per update
    gamma: float = 0.99
    value_loss_weight: float = 0.5
    entropy_weight: float = 0.01
    completion_loss_weight: float = 0.5
    learning_rate: float = 7e-4
    grad_clip_norm: float = 0.5
    rmsprop_decay: float = 0.99
    rmsprop_eps: float = 1e-5
    total_env_steps: int = 1_000_000
    seed: int = 0
    log_interval: int = 50          # iterations between log records
    # stop once every enabled task's windowed success rate reaches this
    # level (0 disables); the window is the last log interval
    early_stop_success: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        for f in ("value_loss_weight", "entropy_weight", "completion_loss_weight",
                  "learning_rate", "grad_clip_norm"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be >= 0")
        self.tasks = parse_tasks(self.tasks)

    @property
    def task_names(self):
        return [t.name.lower() for t in self.tasks]


_VALID_KEYS = {f.name for f in dataclasses.fields(TrainConfig)}


def load_config(source, overrides=None):
    """Build a TrainConfig from a JSON file path or a dict; reject unknown keys."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source) as fh:
            doc = json.load(fh)
    else:
        doc = dict(source or {})
    unknown = set(doc) - _VALID_KEYS
    if unknown:
        raise ValueError(
            f"unknown config keys {sorted(unknown)}; valid keys: {sorted(_VALID_KEYS)}")
    if overrides:
        doc.update({k: v for k, v in overrides.items() if v is not None})
    return TrainConfig(**doc)

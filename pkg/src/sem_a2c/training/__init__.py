from .config import TASK_ALIASES, TrainConfig, load_config, parse_tasks
from .rollout import Collector, RolloutChunk, VecTaxi
from .returns import compute_returns
from .loss import LossWeights, a2c_loss_and_grads
from .optim import RMSProp
from .loop import Trainer, continual_freeze, trainable_group_names

__all__ = [
    "TrainConfig",
    "load_config",
    "parse_tasks",
    "TASK_ALIASES",
    "VecTaxi",
    "Collector",
    "RolloutChunk",
    "compute_returns",
    "LossWeights",
    "a2c_loss_and_grads",
    "RMSProp",
    "Trainer",
    "continual_freeze",
    "trainable_group_names",
]

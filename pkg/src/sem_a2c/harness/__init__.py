from .checkpoint import (
    CheckpointError,
    load_checkpoint,
    load_net,
    save_checkpoint,
)
from .evaluate import EvalReport, NetPolicy, eval_by_appearance
from .heatmap import HeatmapGrid, collect_heatmap
from .gradcheck_run import full_model_grad_check

__all__ = [
    "CheckpointError",
    "save_checkpoint",
    "load_checkpoint",
    "load_net",
    "EvalReport",
    "NetPolicy",
    "eval_by_appearance",
    "HeatmapGrid",
    "collect_heatmap",
    "full_model_grad_check",
]

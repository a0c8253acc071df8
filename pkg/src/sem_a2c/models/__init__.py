from .nets import (
    MODEL_NAMES,
    AgentState,
    ForwardOutput,
    LstmState,
    ModelConfig,
    SemNet,
    SingleRnnNet,
    make_model,
    reset_episode,
    solve_baseline_hidden,
)

__all__ = [
    "MODEL_NAMES",
    "AgentState",
    "LstmState",
    "ForwardOutput",
    "ModelConfig",
    "SemNet",
    "SingleRnnNet",
    "make_model",
    "reset_episode",
    "solve_baseline_hidden",
]

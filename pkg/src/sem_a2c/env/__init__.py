from .taxi import (
    ABSENT,
    ALL_TASKS,
    DELIVERED,
    IN_TAXI,
    TAXI_TASKS,
    PRETRAIN_TASKS,
    Action,
    EnvConfig,
    EpisodeDoneError,
    MapGenerationError,
    Observation,
    StepOutcome,
    TaskId,
    TaxiWorld,
    CH_WALL,
    CH_WATER,
    CH_PASSENGER,
    CH_CARGO,
    CH_TARGET,
    CH_OOB,
    N_CHANNELS,
    VIEW,
)
from .pathing import component_labels, shortest_path_steps

__all__ = [
    "Action",
    "TaskId",
    "TaxiWorld",
    "EnvConfig",
    "Observation",
    "StepOutcome",
    "MapGenerationError",
    "EpisodeDoneError",
    "IN_TAXI",
    "DELIVERED",
    "ABSENT",
    "TAXI_TASKS",
    "PRETRAIN_TASKS",
    "ALL_TASKS",
    "component_labels",
    "shortest_path_steps",
    "CH_WALL",
    "CH_WATER",
    "CH_PASSENGER",
    "CH_CARGO",
    "CH_TARGET",
    "CH_OOB",
    "N_CHANNELS",
    "VIEW",
]

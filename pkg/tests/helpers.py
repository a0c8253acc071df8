"""Hand-built worlds for exact dynamics tests."""

import numpy as np

from sem_a2c.env import TaskId, TaxiWorld


def make_world(cells, taxi, passenger, target, cargo="absent", task=TaskId.REACH_P,
               tasks=(0, 1, 2, 3), episode_len=400, step_count=0,
               tasks_since_relocation=0, relocation_quota=3, single_task=False,
               rng_seed=0):
    """Build a TaxiWorld from ASCII rows ('.' empty, '#' wall, '~' water)."""
    doc = {
        "width": len(cells[0]),
        "height": len(cells),
        "episode_len": episode_len,
        "tasks": [int(t) for t in tasks],
        "single_task": single_task,
        "cells": list(cells),
        "taxi": list(taxi),
        "passenger": list(passenger) if isinstance(passenger, tuple) else passenger,
        "cargo": list(cargo) if isinstance(cargo, tuple) else cargo,
        "target": list(target),
        "task": int(task),
        "step_count": step_count,
        "tasks_since_relocation": tasks_since_relocation,
        "relocation_quota": relocation_quota,
        "episode_done": False,
        "rng_state": np.random.Generator(np.random.PCG64(rng_seed)).bit_generator.state,
    }
    return TaxiWorld.from_snapshot(doc)


OPEN_7 = ["." * 7 for _ in range(7)]

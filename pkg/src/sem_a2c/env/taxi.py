"""Randomized partially-observable Taxi grid-world with chained sub-tasks.

An episode runs on a fixed randomly generated map for a fixed number of
steps. The active sub-task advances through the passenger chain
Reach(P) -> Pickup(P) -> Reach(D) -> Dropoff(P) (and, when cargo tasks are
enabled, the cargo chain Reach(C) -> Pickup(C) -> Deliver(C)); a delivery
respawns a fresh object and a new chain starts. Every two or three completed
sub-tasks the taxi and all pickable objects are moved to fresh random cells,
while the map layout and the target never change within an episode.

Rewards: -0.1 per action, -0.3 instead when the action is taken while
standing on water, +1 added on the step that completes the active sub-task.

All randomness flows through one numpy PCG64 generator seeded at
construction, so a seed plus an action sequence reproduces an episode
bit-for-bit on any platform.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .pathing import component_labels

VIEW = 7
VIEW_RADIUS = VIEW // 2

# observation channels
CH_WALL = 0
CH_WATER = 1
CH_PASSENGER = 2
CH_CARGO = 3
CH_TARGET = 4
CH_OOB = 5
N_CHANNELS = 6

# cell terrain codes ('.', '#', '~' in snapshots)
EMPTY = 0
WALL = 1
WATER = 2

STEP_PENALTY = -0.1
WATER_PENALTY = -0.3
COMPLETION_REWARD = 1.0

# where a pickable object is, besides an (r, c) cell
IN_TAXI = "in_taxi"
DELIVERED = "delivered"
ABSENT = "absent"

_PLACEMENT_RETRIES = 200


class TaskId(IntEnum):
    REACH_P = 0
    PICKUP_P = 1
    REACH_D = 2
    DROPOFF_P = 3
    REACH_C = 4
    PICKUP_C = 5
    DELIVER_C = 6


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    PICKUP = 4
    DROPOFF = 5


_MOVE_DELTAS = {
    Action.UP: (-1, 0),
    Action.DOWN: (1, 0),
    Action.LEFT: (0, -1),
    Action.RIGHT: (0, 1),
}

TAXI_TASKS = (TaskId.REACH_P, TaskId.PICKUP_P, TaskId.REACH_D, TaskId.DROPOFF_P)
PRETRAIN_TASKS = TAXI_TASKS + (TaskId.REACH_C,)
ALL_TASKS = PRETRAIN_TASKS + (TaskId.PICKUP_C, TaskId.DELIVER_C)


class MapGenerationError(RuntimeError):
    """No valid entity placement found within the retry budget; re-seed upstream."""


class EpisodeDoneError(RuntimeError):
    """step() called on a finished episode."""


@dataclass(frozen=True)
class EnvConfig:
    width: int = 15
    height: int = 15
    episode_len: int = 400
    tasks: tuple = TAXI_TASKS
    # batch multi-task mode: one task per episode, episode ends on completion
    single_task: bool = False

    def __post_init__(self):
        if self.width * self.height < 25:
            raise ValueError("map must have at least 25 cells")
        object.__setattr__(self, "tasks", tuple(TaskId(t) for t in self.tasks))

    @property
    def cargo_enabled(self):
        return TaskId.REACH_C in self.tasks


@dataclass
class Observation:
    """Egocentric 7x7 view plus carrying flags; no absolute coordinates."""
    grid: np.ndarray   # (N_CHANNELS, 7, 7) float32
    flags: np.ndarray  # (2,) float32: passenger in taxi, cargo in taxi


@dataclass
class StepOutcome:
    observation: Observation
    reward: float
    completion: int
    episode_done: bool
    next_task: TaskId


class TaxiWorld:
    """One episode instance. Owned and stepped by a single actor."""

    def __init__(self, config, rng, cells, labels, taxi_pos, passenger, cargo,
                 target_pos, current_task, step_count=0, tasks_since_relocation=0,
                 relocation_quota=None):
        self.config = config
        self.rng = rng
        self.cells = cells
        self._labels = labels
        self.taxi_pos = taxi_pos
        self.passenger = passenger
        self.cargo = cargo
        self.target_pos = target_pos
        self.current_task = current_task
        self.step_count = step_count
        self.tasks_since_relocation = tasks_since_relocation
        self.relocation_quota = (relocation_quota if relocation_quota is not None
                                 else self._draw_quota())
        self.episode_done = False

    # --- construction ---------------------------------------------------

    @classmethod
    def generate(cls, seed, config=EnvConfig()):
        """Build a fresh episode: random map, placements, initial task.

        Exactly floor(0.1 * cells) wall and floor(0.1 * cells) water cells are
        drawn uniformly; entity placements are re-drawn until the passenger
        and the target (and cargo, when present) are reachable from the taxi.
        Raises MapGenerationError if no placement works for this layout.
        """
        rng = np.random.Generator(np.random.PCG64(seed))
        w, h = config.width, config.height
        n_cells = w * h
        n_wall = n_water = n_cells // 10

        cells = np.zeros((h, w), dtype=np.int8)
        terrain = rng.choice(n_cells, size=n_wall + n_water, replace=False)
        cells.flat[terrain[:n_wall]] = WALL
        cells.flat[terrain[n_wall:]] = WATER
        labels = component_labels(cells != WALL)

        n_entities = 4 if config.cargo_enabled else 3
        passable_flat = np.flatnonzero(cells.flat != WALL)
        for _ in range(_PLACEMENT_RETRIES):
            picks = rng.choice(passable_flat, size=n_entities, replace=False)
            spots = [(int(p) // w, int(p) % w) for p in picks]
            if len({labels[s] for s in spots}) == 1:
                break
        else:
            raise MapGenerationError(
                f"no mutually reachable placement found on this {w}x{h} layout"
            )
        taxi, passenger, target = spots[0], spots[1], spots[2]
        cargo = spots[3] if config.cargo_enabled else ABSENT

        world = cls(config, rng, cells, labels, taxi, passenger, cargo,
                    target, current_task=TaskId.REACH_P)
        if config.single_task:
            world.current_task = world._setup_single_task()
        else:
            world.current_task = world._choose_chain_start()
        return world

    def _draw_quota(self):
        return int(self.rng.integers(2, 4))

    def _setup_single_task(self):
        """Sample this episode's only task and adjust the start state to fit it."""
        task = TaskId(self.rng.choice(np.asarray(self.config.tasks, dtype=np.int64)))
        if task == TaskId.PICKUP_P:
            self.taxi_pos = self.passenger
        elif task == TaskId.REACH_D:
            self.passenger = IN_TAXI
        elif task == TaskId.DROPOFF_P:
            self.passenger = IN_TAXI
            self.taxi_pos = self.target_pos
        elif task == TaskId.PICKUP_C:
            self.taxi_pos = self.cargo
        elif task == TaskId.DELIVER_C:
            self.cargo = IN_TAXI
        return task

    # --- observation ------------------------------------------------------

    def observe(self):
        grid = np.zeros((N_CHANNELS, VIEW, VIEW), dtype=np.float32)
        h, w = self.cells.shape
        r0, c0 = self.taxi_pos
        rs, cs = r0 - VIEW_RADIUS, c0 - VIEW_RADIUS

        mr0, mr1 = max(rs, 0), min(rs + VIEW, h)
        mc0, mc1 = max(cs, 0), min(cs + VIEW, w)
        vr0, vc0 = mr0 - rs, mc0 - cs
        vr1, vc1 = vr0 + (mr1 - mr0), vc0 + (mc1 - mc0)

        grid[CH_OOB] = 1.0
        grid[CH_OOB, vr0:vr1, vc0:vc1] = 0.0
        window = self.cells[mr0:mr1, mc0:mc1]
        grid[CH_WALL, vr0:vr1, vc0:vc1] = window == WALL
        grid[CH_WATER, vr0:vr1, vc0:vc1] = window == WATER

        for ch, obj in ((CH_PASSENGER, self.passenger),
                        (CH_CARGO, self.cargo),
                        (CH_TARGET, self.target_pos)):
            if isinstance(obj, tuple):
                dr, dc = obj[0] - rs, obj[1] - cs
                if 0 <= dr < VIEW and 0 <= dc < VIEW:
                    grid[ch, dr, dc] = 1.0

        flags = np.array(
            [self.passenger is IN_TAXI, self.cargo is IN_TAXI], dtype=np.float32
        )
        return Observation(grid, flags)

    # --- dynamics ---------------------------------------------------------

    def step(self, action):
        if self.episode_done:
            raise EpisodeDoneError("episode is over; generate a new world")
        action = Action(action)

        pre_taxi = self.taxi_pos
        pre_passenger = self.passenger
        pre_cargo = self.cargo
        acting_from_water = self.cells[pre_taxi] == WATER

        if action in _MOVE_DELTAS:
            dr, dc = _MOVE_DELTAS[action]
            nr, nc = pre_taxi[0] + dr, pre_taxi[1] + dc
            h, w = self.cells.shape
            if 0 <= nr < h and 0 <= nc < w and self.cells[nr, nc] != WALL:
                self.taxi_pos = (nr, nc)
        elif action == Action.PICKUP:
            if self.passenger == pre_taxi:
                self.passenger = IN_TAXI
            if self.cargo == pre_taxi:
                self.cargo = IN_TAXI
        elif action == Action.DROPOFF:
            # off-target dropoff is a no-op; a delivery respawns a fresh
            # object within the same step, so DELIVERED is never observable
            if pre_taxi == self.target_pos:
                if self.passenger is IN_TAXI:
                    self.passenger = DELIVERED
                    self.passenger = self._respawn_cell()
                if self.cargo is IN_TAXI:
                    self.cargo = DELIVERED
                    self.cargo = self._respawn_cell()

        completed = self._task_completed(action, pre_taxi, pre_passenger, pre_cargo)

        reward = WATER_PENALTY if acting_from_water else STEP_PENALTY
        if completed:
            reward += COMPLETION_REWARD

        self.step_count += 1
        if completed:
            if self.config.single_task:
                self.episode_done = True
            else:
                self._advance_task()
        if self.step_count >= self.config.episode_len:
            self.episode_done = True

        return StepOutcome(
            observation=self.observe(),
            reward=reward,
            completion=int(completed),
            episode_done=self.episode_done,
            next_task=self.current_task,
        )

    def _task_completed(self, action, pre_taxi, pre_passenger, pre_cargo):
        task = self.current_task
        if task == TaskId.REACH_P:
            return isinstance(self.passenger, tuple) and self.taxi_pos == self.passenger
        if task == TaskId.PICKUP_P:
            return action == Action.PICKUP and pre_passenger == pre_taxi
        if task == TaskId.REACH_D:
            return self.taxi_pos == self.target_pos
        if task == TaskId.DROPOFF_P:
            return (action == Action.DROPOFF and pre_taxi == self.target_pos
                    and pre_passenger is IN_TAXI)
        if task == TaskId.REACH_C:
            return isinstance(self.cargo, tuple) and self.taxi_pos == self.cargo
        if task == TaskId.PICKUP_C:
            return action == Action.PICKUP and pre_cargo == pre_taxi
        if task == TaskId.DELIVER_C:
            return (action == Action.DROPOFF and pre_taxi == self.target_pos
                    and pre_cargo is IN_TAXI)
        raise ValueError(f"unknown task {task!r}")

    def _advance_task(self):
        self.tasks_since_relocation += 1
        if self.tasks_since_relocation >= self.relocation_quota:
            self._relocate()
            self.tasks_since_relocation = 0
            self.relocation_quota = self._draw_quota()

        nxt = self._chain_successor(self.current_task)
        self.current_task = nxt if nxt is not None else self._choose_chain_start()

    def _chain_successor(self, task):
        if task == TaskId.REACH_P:
            return TaskId.PICKUP_P
        if task == TaskId.PICKUP_P:
            return TaskId.REACH_D
        if task == TaskId.REACH_D:
            return TaskId.DROPOFF_P
        if task == TaskId.REACH_C and TaskId.PICKUP_C in self.config.tasks:
            return TaskId.PICKUP_C
        if task == TaskId.PICKUP_C:
            return TaskId.DELIVER_C
        return None  # DROPOFF_P, DELIVER_C, or a bare REACH_C end their chain

    def _choose_chain_start(self):
        """Tasks that can logically start in the current state."""
        tasks = self.config.tasks
        candidates = []
        if isinstance(self.passenger, tuple):
            if self.taxi_pos != self.passenger:
                candidates.append(TaskId.REACH_P)
            else:
                candidates.append(TaskId.PICKUP_P)
        elif self.passenger is IN_TAXI:
            candidates.append(TaskId.REACH_D)
        if isinstance(self.cargo, tuple) and TaskId.REACH_C in tasks:
            if self.taxi_pos != self.cargo:
                candidates.append(TaskId.REACH_C)
            elif TaskId.PICKUP_C in tasks:
                candidates.append(TaskId.PICKUP_C)
        elif self.cargo is IN_TAXI and TaskId.DELIVER_C in tasks:
            candidates.append(TaskId.DELIVER_C)
        if not candidates:
            raise RuntimeError("no startable task; state machine invariant broken")
        return TaskId(self.rng.choice(np.asarray(candidates, dtype=np.int64)))

    # --- placement helpers -------------------------------------------------

    def _occupied(self):
        spots = {self.taxi_pos, self.target_pos}
        if isinstance(self.passenger, tuple):
            spots.add(self.passenger)
        if isinstance(self.cargo, tuple):
            spots.add(self.cargo)
        return spots

    def _respawn_cell(self):
        """Fresh cell for a delivered object: passable, unoccupied, reachable."""
        taxi_comp = self._labels[self.taxi_pos]
        h, w = self.cells.shape
        occupied = self._occupied()
        for _ in range(_PLACEMENT_RETRIES):
            flat = int(self.rng.integers(0, h * w))
            spot = (flat // w, flat % w)
            if self._labels[spot] == taxi_comp and spot not in occupied:
                return spot
        raise MapGenerationError("could not respawn object on this layout")

    def _relocate(self):
        """Move taxi and every on-map pickable object to fresh distinct cells.

        Carried objects stay in the taxi; the map and the target stay fixed.
        New positions must differ from the old ones and stay in the target's
        component so the episode remains winnable.
        """
        target_comp = self._labels[self.target_pos]
        h, w = self.cells.shape
        movable = ["taxi"]
        if isinstance(self.passenger, tuple):
            movable.append("passenger")
        if isinstance(self.cargo, tuple):
            movable.append("cargo")
        old = {"taxi": self.taxi_pos, "passenger": self.passenger, "cargo": self.cargo}

        for _ in range(_PLACEMENT_RETRIES):
            flats = self.rng.choice(h * w, size=len(movable), replace=False)
            spots = [(int(f) // w, int(f) % w) for f in flats]
            ok = all(self._labels[s] == target_comp for s in spots)
            ok = ok and all(s != self.target_pos and s != old[name]
                            for name, s in zip(movable, spots))
            if ok:
                for name, s in zip(movable, spots):
                    if name == "taxi":
                        self.taxi_pos = s
                    elif name == "passenger":
                        self.passenger = s
                    else:
                        self.cargo = s
                return
        raise MapGenerationError("could not relocate entities on this layout")

    # --- serialization ------------------------------------------------------

    _CELL_CHARS = {EMPTY: ".", WALL: "#", WATER: "~"}
    _CHAR_CELLS = {v: k for k, v in _CELL_CHARS.items()}

    def snapshot(self):
        """JSON-safe dump of the full world state, including the RNG."""
        def obj_doc(obj):
            return list(obj) if isinstance(obj, tuple) else obj

        return {
            "width": self.config.width,
            "height": self.config.height,
            "episode_len": self.config.episode_len,
            "tasks": [int(t) for t in self.config.tasks],
            "single_task": self.config.single_task,
            "cells": ["".join(self._CELL_CHARS[c] for c in row) for row in self.cells],
            "taxi": list(self.taxi_pos),
            "passenger": obj_doc(self.passenger),
            "cargo": obj_doc(self.cargo),
            "target": list(self.target_pos),
            "task": int(self.current_task),
            "step_count": self.step_count,
            "tasks_since_relocation": self.tasks_since_relocation,
            "relocation_quota": self.relocation_quota,
            "episode_done": self.episode_done,
            "rng_state": self.rng.bit_generator.state,
        }

    @classmethod
    def from_snapshot(cls, doc):
        config = EnvConfig(
            width=doc["width"], height=doc["height"], episode_len=doc["episode_len"],
            tasks=tuple(TaskId(t) for t in doc["tasks"]),
            single_task=doc["single_task"],
        )
        cells = np.array(
            [[cls._CHAR_CELLS[ch] for ch in row] for row in doc["cells"]], dtype=np.int8
        )
        rng = np.random.Generator(np.random.PCG64())
        rng.bit_generator.state = doc["rng_state"]

        def obj_from(d):
            return tuple(d) if isinstance(d, list) else d

        world = cls(
            config, rng, cells, component_labels(cells != WALL),
            taxi_pos=tuple(doc["taxi"]),
            passenger=obj_from(doc["passenger"]),
            cargo=obj_from(doc["cargo"]),
            target_pos=tuple(doc["target"]),
            current_task=TaskId(doc["task"]),
            step_count=doc["step_count"],
            tasks_since_relocation=doc["tasks_since_relocation"],
            relocation_quota=doc["relocation_quota"],
        )
        world.episode_done = doc["episode_done"]
        return world

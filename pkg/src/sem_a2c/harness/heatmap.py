"""Visit-frequency heatmaps for the passenger-delivery leg.

Over repeated episodes on one fixed map, count the taxi's position at every
step taken while Reach(D) is the active sub-task. Each Reach(D) segment is
classified by whether the taxi had already entered the target cell earlier
in the episode ('after-target-visit') or not ('before-target-visit'): an
agent that remembers the target should head straight for it in the 'after'
condition.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ..env import EnvConfig, TaskId, TaxiWorld
from ..env.taxi import WALL

CONDITIONS = ("before-target-visit", "after-target-visit")


@dataclass
class HeatmapGrid:
    counts: np.ndarray          # (H, W) int64 visit counts
    condition: str
    n_runs: int
    segments: int               # Reach(D) segments matching the condition

    def normalized(self):
        total = self.counts.sum()
        if total == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts / float(total)

    def to_csv(self, path):
        np.savetxt(path, self.normalized(), delimiter=",", fmt="%.9f")

    def to_pgm(self, path):
        """8-bit binary PGM, brightest cell = most visited."""
        freq = self.normalized()
        peak = freq.max()
        img = np.zeros(freq.shape, dtype=np.uint8)
        if peak > 0:
            img = np.round(freq / peak * 255).astype(np.uint8)
        h, w = img.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode())
            fh.write(img.tobytes())


def collect_heatmap(policy_factory, map_seed, n_runs, condition,
                    env_cfg=None, map_size=15, episode_len=400):
    """Accumulate Reach(D) visit counts under one condition.

    policy_factory(run_index) must return a fresh policy per run; every run
    replays the same map seed, so trajectories differ only through the
    policy's own stochasticity.
    """
    if condition not in CONDITIONS:
        raise ValueError(f"condition must be one of {CONDITIONS}")
    env_cfg = env_cfg or EnvConfig(map_size, map_size, episode_len)
    counts = None
    segments = 0

    for run in range(n_runs):
        world = TaxiWorld.generate(map_seed, env_cfg)
        if counts is None:
            counts = np.zeros(world.cells.shape, dtype=np.int64)
        policy = policy_factory(run)
        policy.reset()
        ever_on_target = world.taxi_pos == world.target_pos
        task = world.current_task
        segment_matches = None
        if task == TaskId.REACH_D:
            segment_matches = _classify(ever_on_target) == condition
            segments += bool(segment_matches)
        d_env = 0.0

        for _ in range(env_cfg.episode_len):
            in_reach_d = task == TaskId.REACH_D
            action = policy.act(world.observe(), task, d_env, world)
            outcome = world.step(action)
            d_env = float(outcome.completion)
            if in_reach_d and segment_matches:
                counts[world.taxi_pos] += 1
            if world.taxi_pos == world.target_pos:
                ever_on_target = True
            if outcome.episode_done:
                break
            if outcome.completion and outcome.next_task == TaskId.REACH_D:
                segment_matches = _classify(ever_on_target) == condition
                segments += bool(segment_matches)
            task = outcome.next_task

        # walls are unreachable; a count there means the accounting broke
        assert counts[world.cells == WALL].sum() == 0

    if segments == 0:
        warnings.warn(
            f"condition {condition!r} never occurred in {n_runs} runs; "
            "heatmap is empty")
    return HeatmapGrid(counts=counts, condition=condition, n_runs=n_runs,
                       segments=segments)


def _classify(ever_on_target):
    return "after-target-visit" if ever_on_target else "before-target-visit"

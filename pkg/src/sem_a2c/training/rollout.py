"""Parallel rollout collection.

N environment instances step in lockstep against one batched forward pass.
Hidden states persist across rollout chunks within an episode; when a
worker's episode ends its environment is regenerated on a fresh seed, its
state rows are zeroed and its d/a inputs reset, all before the next forward.
"""

from dataclasses import dataclass, field

import numpy as np

from ..env import EnvConfig, MapGenerationError, TaxiWorld


class VecTaxi:
    """N independently seeded worlds stepped by one owner."""

    def __init__(self, n, env_config, seed):
        self.n = n
        self.config = env_config
        self._worker_seqs = np.random.SeedSequence(seed).spawn(n)
        self.worlds = [self._fresh_world(i) for i in range(n)]

    def _fresh_world(self, i):
        # a layout can fail placement; draw further seeds until one works
        for _ in range(100):
            child = self._worker_seqs[i].spawn(1)[0]
            try:
                return TaxiWorld.generate(child, self.config)
            except MapGenerationError:
                continue
        raise MapGenerationError(f"worker {i}: no generatable map in 100 attempts")

    def reset_world(self, i):
        self.worlds[i] = self._fresh_world(i)
        return self.worlds[i]


@dataclass
class RolloutChunk:
    """Per-step records of one collection phase, time-major."""
    obs_grid: np.ndarray    # (T, N, C, V, V) float32
    flags: np.ndarray       # (T, N, 2) float32
    tasks: np.ndarray       # (T, N) int64
    d_prev: np.ndarray      # (T, N) float32
    a_prev: np.ndarray      # (T, N, A) float32
    actions: np.ndarray     # (T, N) int64
    rewards: np.ndarray     # (T, N) float64, exactly as emitted
    dones: np.ndarray       # (T, N) float64; 1 where the episode ended here
    d_target: np.ndarray    # (T, N) float32 ground-truth completion d_t
    values: np.ndarray      # (T, N) float64 critic estimates at collection
    bootstrap: np.ndarray   # (N,) float64 critic value after the last step
    initial_state: object   # recurrent state before step 0 (detached copy)
    outputs: list = field(default=None, repr=False)
    caches: list = field(default=None, repr=False)

    @property
    def n_transitions(self):
        return self.rewards.size


def sample_actions(policy, rng):
    """Inverse-CDF sampling, one categorical draw per row."""
    u = rng.random((policy.shape[0], 1))
    acts = (u > np.cumsum(policy, axis=1)).sum(axis=1)
    return np.minimum(acts, policy.shape[1] - 1)


class Collector:
    def __init__(self, venv, net, rng):
        self.venv = venv
        self.net = net
        self.rng = rng
        n = venv.n
        self.n_actions = net.cfg.n_actions
        self.state = net.init_state(n)
        self.d_prev = np.zeros(n, dtype=np.float32)
        self.a_prev = np.zeros((n, self.n_actions), dtype=np.float32)
        self.tasks = np.array([w.current_task for w in venv.worlds], dtype=np.int64)
        self._load_observations()
        # window statistics, drained by pop_stats()
        self._succ = {}
        self._fail = {}
        self._ep_return = np.zeros(n)
        self._finished_returns = []
        self.total_steps = 0

    def _load_observations(self):
        obs = [w.observe() for w in self.venv.worlds]
        self.obs_grid = np.stack([o.grid for o in obs])
        self.flags = np.stack([o.flags for o in obs])

    def _note(self, counter, task):
        counter[int(task)] = counter.get(int(task), 0) + 1

    def pop_stats(self):
        """Success/attempt counters and episode returns since the last call."""
        stats = {
            "success": dict(self._succ),
            "failure": dict(self._fail),
            "episode_returns": list(self._finished_returns),
        }
        self._succ, self._fail, self._finished_returns = {}, {}, []
        return stats

    def collect(self, n_steps, keep_caches=True):
        net, venv, rng = self.net, self.venv, self.rng
        n = venv.n
        rec = {k: [] for k in ("obs", "flags", "tasks", "d_prev", "a_prev",
                               "actions", "rewards", "dones", "d_target", "values")}
        outputs, caches = [], []
        initial_state = self.state.copy()

        for _ in range(n_steps):
            out, cache = net.forward(self.obs_grid, self.flags, self.tasks,
                                     self.d_prev, self.a_prev, self.state)
            actions = sample_actions(out.policy, rng)

            rec["obs"].append(self.obs_grid)
            rec["flags"].append(self.flags)
            rec["tasks"].append(self.tasks.copy())
            rec["d_prev"].append(self.d_prev.copy())
            rec["a_prev"].append(self.a_prev.copy())
            rec["actions"].append(actions)
            rec["values"].append(out.value.astype(np.float64))
            outputs.append(out)
            if keep_caches:
                caches.append(cache)

            rewards = np.empty(n, dtype=np.float64)
            dones = np.zeros(n, dtype=np.float64)
            d_t = np.zeros(n, dtype=np.float32)
            next_tasks = np.empty(n, dtype=np.int64)
            obs_list = [None] * n
            for i, world in enumerate(venv.worlds):
                task_before = world.current_task
                outcome = world.step(int(actions[i]))
                rewards[i] = outcome.reward
                d_t[i] = outcome.completion
                self._ep_return[i] += outcome.reward
                if outcome.completion:
                    self._note(self._succ, task_before)
                if outcome.episode_done:
                    dones[i] = 1.0
                    self._note(self._fail, outcome.next_task)
                    self._finished_returns.append(self._ep_return[i])
                    self._ep_return[i] = 0.0
                    world = venv.reset_world(i)
                    next_tasks[i] = world.current_task
                    obs_list[i] = world.observe()
                else:
                    next_tasks[i] = outcome.next_task
                    obs_list[i] = outcome.observation

            rec["rewards"].append(rewards)
            rec["dones"].append(dones)
            rec["d_target"].append(d_t)

            self.state = out.state
            done_idx = np.flatnonzero(dones)
            if done_idx.size:
                self.state.reset_rows(done_idx)
            self.obs_grid = np.stack([o.grid for o in obs_list])
            self.flags = np.stack([o.flags for o in obs_list])
            self.tasks = next_tasks
            self.d_prev = d_t * (1.0 - dones).astype(np.float32)
            self.a_prev = np.zeros((n, self.n_actions), dtype=np.float32)
            alive = np.flatnonzero(dones == 0)
            self.a_prev[alive, actions[alive]] = 1.0
            self.total_steps += n

        boot_out, _ = net.forward(self.obs_grid, self.flags, self.tasks,
                                  self.d_prev, self.a_prev, self.state)

        return RolloutChunk(
            obs_grid=np.stack(rec["obs"]),
            flags=np.stack(rec["flags"]),
            tasks=np.stack(rec["tasks"]),
            d_prev=np.stack(rec["d_prev"]),
            a_prev=np.stack(rec["a_prev"]),
            actions=np.stack(rec["actions"]),
            rewards=np.stack(rec["rewards"]),
            dones=np.stack(rec["dones"]),
            d_target=np.stack(rec["d_target"]),
            values=np.stack(rec["values"]),
            bootstrap=boot_out.value.astype(np.float64),
            initial_state=initial_state,
            outputs=outputs,
            caches=caches if keep_caches else None,
        )

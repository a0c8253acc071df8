"""Evaluation on the full passenger-delivery sequence.

An evaluation episode runs the meta procedure on the four taxi sub-tasks:
Reach(P) -> Pickup(P) -> Reach(D) -> Dropoff(P), new passenger after each
delivery, one fixed map per episode. Completion times are grouped by the
sub-task's appearance index (its 1st, 2nd, ... assignment within the
episode): reusing knowledge of the fixed target location should shrink
Reach(D) times from the second appearance on, which is the effect under
measurement.

Assignments still open when the episode clock runs out count as failures and
are excluded from the step means.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..env import EnvConfig, MapGenerationError, TaskId, TaxiWorld
from ..training.rollout import sample_actions

MAX_APPEARANCE = 5


class NetPolicy:
    """Stateful wrapper driving a network one environment at a time."""

    def __init__(self, net, rng, use_predicted_completion=False):
        self.net = net
        self.rng = rng
        self.use_predicted_completion = use_predicted_completion
        self.reset()

    def reset(self):
        self.state = self.net.init_state(1)
        self.d_prev = np.zeros(1, dtype=np.float32)
        self.a_prev = np.zeros((1, self.net.cfg.n_actions), dtype=np.float32)
        self._last_comp_prob = 0.0

    def act(self, obs, task_id, d_env, world=None):
        # the completion input is the environment's signal unless the
        # predicted-completion evaluation mode is on
        if self.use_predicted_completion:
            self.d_prev[0] = 1.0 if self._last_comp_prob > 0.5 else 0.0
        else:
            self.d_prev[0] = d_env
        out, _ = self.net.forward(obs.grid[None], obs.flags[None],
                                  np.array([int(task_id)]), self.d_prev,
                                  self.a_prev, self.state)
        action = int(sample_actions(out.policy, self.rng)[0])
        self.state = out.state
        self._last_comp_prob = float(out.comp_prob[0])
        self.a_prev[...] = 0
        self.a_prev[0, action] = 1
        return action


@dataclass
class EvalCell:
    completions: int = 0
    failures: int = 0
    total_steps: int = 0

    @property
    def assignments(self):
        return self.completions + self.failures

    @property
    def mean_steps(self):
        return self.total_steps / self.completions if self.completions else None

    @property
    def success_rate(self):
        return self.completions / self.assignments if self.assignments else None


@dataclass
class EvalReport:
    n_runs: int
    cells: dict = field(default_factory=dict)   # (task, appearance) -> EvalCell
    delivery_steps: list = field(default_factory=list)
    # raw per-episode samples, for resampling statistics:
    # (task, appearance) -> list of per-episode step counts
    samples: dict = field(default_factory=dict)

    def cell(self, task, appearance):
        key = (TaskId(task), appearance)
        if key not in self.cells:
            self.cells[key] = EvalCell()
        return self.cells[key]

    def mean_steps(self, task, appearance):
        key = (TaskId(task), appearance)
        return self.cells[key].mean_steps if key in self.cells else None

    @property
    def delivery_mean_steps(self):
        return float(np.mean(self.delivery_steps)) if self.delivery_steps else None

    def to_rows(self):
        rows = []
        for (task, app) in sorted(self.cells, key=lambda k: (int(k[0]), k[1])):
            if app > MAX_APPEARANCE:
                continue
            c = self.cells[(task, app)]
            rows.append({
                "task": task.name.lower(),
                "appearance": app,
                "mean_steps": c.mean_steps,
                "success_rate": c.success_rate,
                "completions": c.completions,
                "assignments": c.assignments,
            })
        if self.delivery_steps:
            rows.append({
                "task": "full_delivery", "appearance": "",
                "mean_steps": self.delivery_mean_steps,
                "success_rate": None,
                "completions": len(self.delivery_steps),
                "assignments": len(self.delivery_steps),
            })
        return rows

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=[
            "task", "appearance", "mean_steps", "success_rate",
            "completions", "assignments"])
        writer.writeheader()
        for row in self.to_rows():
            out = dict(row)
            for k in ("mean_steps", "success_rate"):
                if out[k] is not None:
                    out[k] = f"{out[k]:.4f}"
                else:
                    out[k] = ""
            writer.writerow(out)
        return buf.getvalue()

    def overall_success_rate(self, task=None):
        comp = fail = 0
        for (t, _), c in self.cells.items():
            if task is None or t == TaskId(task):
                comp += c.completions
                fail += c.failures
        return comp / (comp + fail) if comp + fail else None


def _fresh_world(seq, env_cfg):
    for _ in range(100):
        child = seq.spawn(1)[0]
        try:
            return TaxiWorld.generate(child, env_cfg)
        except MapGenerationError:
            continue
    raise MapGenerationError("no generatable evaluation map in 100 attempts")


def eval_by_appearance(policy, n_runs, map_size=15, episode_len=400, seed=0,
                       env_cfg=None):
    """Run n_runs full-episode evaluations; aggregate by appearance index.

    policy implements reset() and act(obs, task_id, d_env, world) like
    NetPolicy. Returns an EvalReport.
    """
    env_cfg = env_cfg or EnvConfig(map_size, map_size, episode_len)
    env_seq = np.random.SeedSequence(seed)
    report = EvalReport(n_runs=n_runs)

    for _ in range(n_runs):
        world = _fresh_world(env_seq, env_cfg)
        policy.reset()
        appearance = {t: 0 for t in env_cfg.tasks}
        task = world.current_task
        appearance[task] += 1
        assign_step = 0
        cycle_start = 0 if task == TaskId.REACH_P else None
        d_env = 0.0
        episode_samples = {}

        for t in range(env_cfg.episode_len):
            action = policy.act(world.observe(), task, d_env, world)
            outcome = world.step(action)
            d_env = float(outcome.completion)
            if outcome.completion:
                steps = t - assign_step + 1
                cell = report.cell(task, appearance[task])
                cell.completions += 1
                cell.total_steps += steps
                episode_samples.setdefault((task, appearance[task]), []).append(steps)
                if task == TaskId.DROPOFF_P and cycle_start is not None:
                    report.delivery_steps.append(t - cycle_start + 1)
                    cycle_start = None
            if outcome.episode_done:
                if not outcome.completion:
                    report.cell(task, appearance[task]).failures += 1
                break
            if outcome.completion:
                task = outcome.next_task
                appearance[task] = appearance.get(task, 0) + 1
                assign_step = t + 1
                if task == TaskId.REACH_P and cycle_start is None:
                    cycle_start = t + 1

        for key, steps in episode_samples.items():
            report.samples.setdefault(key, []).append(steps)
    return report

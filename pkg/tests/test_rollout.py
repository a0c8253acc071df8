import numpy as np

from sem_a2c.env import EnvConfig
from sem_a2c.models import ModelConfig, make_model
from sem_a2c.training import Collector, VecTaxi

TINY = ModelConfig(conv1_filters=3, conv2_filters=4, embed_dim=5,
                   sem_hidden=6, tsm_hidden=7)


def make_collector(n_workers=2, seed=0, model="sem", episode_len=40):
    env_cfg = EnvConfig(8, 8, episode_len=episode_len)
    venv = VecTaxi(n_workers, env_cfg, seed)
    net = make_model(model, TINY, seed=seed)
    return Collector(venv, net, np.random.default_rng(seed))


class TestCollect:
    def test_two_workers_three_steps_is_six_transitions(self):
        col = make_collector()
        chunk = col.collect(3)
        assert chunk.n_transitions == 6
        assert chunk.rewards.shape == (3, 2)
        assert chunk.obs_grid.shape == (3, 2, 6, 7, 7)

    def test_mask_set_and_state_zeroed_at_episode_end(self):
        col = make_collector(episode_len=5)
        chunk = col.collect(7)
        assert chunk.dones[4].sum() == 2  # both episodes end at step index 4
        # inputs for the following step are a fresh episode start
        assert np.all(chunk.d_prev[5] == 0)
        assert np.all(chunk.a_prev[5] == 0)

    def test_hidden_state_zeroed_after_done(self):
        col = make_collector(episode_len=3)
        col.collect(3)
        assert np.all(col.state.h_sem == 0)
        assert np.all(col.state.c_tsm == 0)

    def test_hidden_state_persists_across_chunks_within_episode(self):
        col = make_collector(episode_len=1000)
        col.collect(4)
        h = col.state.h_sem.copy()
        assert np.any(h != 0)
        col.collect(4)
        assert np.any(col.state.h_sem != h)  # evolved, not reset

    def test_seeded_runs_are_bit_identical(self):
        chunks = [make_collector(seed=7).collect(25) for _ in range(2)]
        for field in ("obs_grid", "flags", "tasks", "d_prev", "a_prev", "actions",
                      "rewards", "dones", "d_target", "values", "bootstrap"):
            a, b = getattr(chunks[0], field), getattr(chunks[1], field)
            assert np.array_equal(a, b), field

    def test_success_stats_track_completions_and_failures(self):
        col = make_collector(episode_len=6, seed=3)
        chunk = col.collect(30)
        stats = col.pop_stats()
        assert sum(stats["success"].values()) == int(chunk.d_target.sum())
        # one active task fails per finished episode
        assert sum(stats["failure"].values()) == int(chunk.dones.sum())
        assert len(stats["episode_returns"]) == int(chunk.dones.sum())

    def test_d_prev_matches_previous_completion_within_episode(self):
        col = make_collector(episode_len=1000, seed=11)
        chunk = col.collect(40)
        alive = chunk.dones[:-1] == 0
        np.testing.assert_array_equal(
            chunk.d_prev[1:][alive], chunk.d_target[:-1][alive])

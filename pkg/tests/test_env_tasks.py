import numpy as np

from sem_a2c.env import (
    Action,
    EnvConfig,
    TaskId,
    TaxiWorld,
    ALL_TASKS,
    PRETRAIN_TASKS,
)

from helpers import OPEN_7, make_world


class TestChainSuccession:
    def test_reach_p_then_pickup_p(self):
        world = make_world(OPEN_7, taxi=(3, 3), passenger=(3, 4), target=(6, 6),
                           task=TaskId.REACH_P)
        out = world.step(Action.RIGHT)
        assert out.completion == 1
        assert out.next_task == TaskId.PICKUP_P

    def test_full_passenger_chain(self):
        world = make_world(OPEN_7, taxi=(3, 3), passenger=(3, 4), target=(3, 6),
                           task=TaskId.REACH_P, relocation_quota=99)
        seq = [
            (Action.RIGHT, TaskId.PICKUP_P),
            (Action.PICKUP, TaskId.REACH_D),
            (Action.RIGHT, TaskId.REACH_D),
            (Action.RIGHT, TaskId.DROPOFF_P),
            (Action.DROPOFF, TaskId.REACH_P),
        ]
        for action, expected_next in seq:
            out = world.step(action)
            assert out.next_task == expected_next, (action, out.next_task)
        # the dropoff spawned a fresh passenger on the map
        assert isinstance(world.passenger, tuple)

    def test_dropoff_spawns_new_passenger_elsewhere(self):
        spawns = set()
        for seed in range(15):
            world = make_world(OPEN_7, taxi=(6, 6), passenger="in_taxi",
                               target=(6, 6), task=TaskId.DROPOFF_P,
                               relocation_quota=99, rng_seed=seed)
            world.step(Action.DROPOFF)
            assert isinstance(world.passenger, tuple)
            assert world.passenger != world.target_pos
            assert world.passenger != world.taxi_pos
            spawns.add(world.passenger)
        assert len(spawns) > 1  # random locations

    def test_cargo_chain_when_enabled(self):
        world = make_world(OPEN_7, taxi=(3, 3), passenger=(0, 0), cargo=(3, 4),
                           target=(3, 6), task=TaskId.REACH_C, tasks=ALL_TASKS,
                           relocation_quota=99)
        out = world.step(Action.RIGHT)
        assert out.next_task == TaskId.PICKUP_C
        out = world.step(Action.PICKUP)
        assert out.next_task == TaskId.DELIVER_C
        world.step(Action.RIGHT)
        out = world.step(Action.RIGHT)
        assert out.completion == 0  # DELIVER_C needs the dropoff action
        out = world.step(Action.DROPOFF)
        assert out.completion == 1
        assert isinstance(world.cargo, tuple)  # respawned

    def test_bare_reach_c_ends_chain_in_pretraining_set(self):
        world = make_world(OPEN_7, taxi=(3, 3), passenger=(0, 0), cargo=(3, 4),
                           target=(6, 6), task=TaskId.REACH_C, tasks=PRETRAIN_TASKS,
                           relocation_quota=99)
        out = world.step(Action.RIGHT)
        assert out.completion == 1
        # Pickup(C) is not in the task set, so a new chain starts instead
        assert out.next_task == TaskId.REACH_P


class TestRelocation:
    def test_three_completions_with_quota_three_relocate(self):
        world = make_world(OPEN_7, taxi=(3, 3), passenger=(3, 4), target=(3, 6),
                           task=TaskId.REACH_P, relocation_quota=3)
        cells0 = world.cells.copy()
        world.step(Action.RIGHT)    # completes REACH_P (1)
        world.step(Action.PICKUP)   # completes PICKUP_P (2)
        taxi_before = world.taxi_pos
        world.step(Action.RIGHT)
        out = world.step(Action.RIGHT)  # completes REACH_D (3) -> relocation
        assert out.completion == 1
        assert world.taxi_pos != (3, 6)  # taxi moved off the target it reached
        assert world.taxi_pos != taxi_before
        np.testing.assert_array_equal(world.cells, cells0)
        assert world.target_pos == (3, 6)
        assert world.tasks_since_relocation == 0
        assert world.relocation_quota in (2, 3)

    def test_carried_objects_stay_in_taxi_through_relocation(self):
        world = make_world(OPEN_7, taxi=(3, 3), passenger=(3, 4), target=(3, 6),
                           task=TaskId.REACH_P, relocation_quota=2)
        world.step(Action.RIGHT)   # 1st completion
        world.step(Action.PICKUP)  # 2nd completion -> relocation
        assert world.passenger == "in_taxi"
        assert world.current_task == TaskId.REACH_D

    def test_relocated_entities_stay_mutually_reachable(self):
        from sem_a2c.env import shortest_path_steps
        from sem_a2c.env.taxi import WALL
        rng = np.random.default_rng(1)
        for seed in range(25):
            world = TaxiWorld.generate(seed, EnvConfig(9, 9, episode_len=250))
            while True:
                out = world.step(int(rng.integers(0, 6)))
                if out.episode_done:
                    break
                passable = world.cells != WALL
                if isinstance(world.passenger, tuple):
                    assert shortest_path_steps(passable, world.taxi_pos,
                                               world.passenger) is not None
                assert shortest_path_steps(passable, world.taxi_pos,
                                           world.target_pos) is not None

    def test_quota_counts_completions_across_chain_restarts(self):
        # dropoff completes the chain and still advances the relocation counter
        world = make_world(OPEN_7, taxi=(6, 6), passenger="in_taxi", target=(6, 6),
                           task=TaskId.DROPOFF_P, tasks_since_relocation=1,
                           relocation_quota=3)
        world.step(Action.DROPOFF)
        assert world.tasks_since_relocation == 2


class TestInitialTask:
    def test_four_task_worlds_start_with_reach_p(self):
        for seed in range(30):
            world = TaxiWorld.generate(seed, EnvConfig(9, 9))
            assert world.current_task == TaskId.REACH_P

    def test_cargo_worlds_start_with_either_reach(self):
        starts = set()
        for seed in range(60):
            world = TaxiWorld.generate(seed, EnvConfig(9, 9, tasks=PRETRAIN_TASKS))
            assert world.current_task in (TaskId.REACH_P, TaskId.REACH_C)
            starts.add(world.current_task)
        assert starts == {TaskId.REACH_P, TaskId.REACH_C}

    def test_single_task_mode_covers_all_tasks_with_valid_starts(self):
        seen = set()
        for seed in range(120):
            world = TaxiWorld.generate(
                seed, EnvConfig(9, 9, tasks=ALL_TASKS, single_task=True))
            t = world.current_task
            seen.add(t)
            if t == TaskId.PICKUP_P:
                assert world.taxi_pos == world.passenger
            elif t == TaskId.REACH_D:
                assert world.passenger == "in_taxi"
            elif t == TaskId.DROPOFF_P:
                assert world.passenger == "in_taxi"
                assert world.taxi_pos == world.target_pos
            elif t == TaskId.PICKUP_C:
                assert world.taxi_pos == world.cargo
            elif t == TaskId.DELIVER_C:
                assert world.cargo == "in_taxi"
        assert seen == set(ALL_TASKS)

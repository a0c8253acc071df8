import numpy as np

from sem_a2c.env import (
    CH_CARGO,
    CH_OOB,
    CH_PASSENGER,
    CH_TARGET,
    CH_WALL,
    CH_WATER,
    EnvConfig,
    TaskId,
    TaxiWorld,
)

from helpers import make_world

OPEN_9 = ["." * 9 for _ in range(9)]


def oob_count_by_enumeration(h, w, taxi):
    """Geometry oracle: count window cells outside the map."""
    n = 0
    for dr in range(-3, 4):
        for dc in range(-3, 4):
            r, c = taxi[0] + dr, taxi[1] + dc
            if not (0 <= r < h and 0 <= c < w):
                n += 1
    return n


class TestWindowGeometry:
    def test_exact_corner(self):
        world = make_world(OPEN_9, taxi=(0, 0), passenger=(8, 8), target=(7, 7))
        obs = world.observe()
        expected = oob_count_by_enumeration(9, 9, (0, 0))
        assert expected == 49 - 16  # only a 4x4 quadrant of the window is in-map
        assert int(obs.grid[CH_OOB].sum()) == expected

    def test_one_in_from_corner_shows_24_oob(self):
        world = make_world(OPEN_9, taxi=(1, 1), passenger=(8, 8), target=(7, 7))
        obs = world.observe()
        assert oob_count_by_enumeration(9, 9, (1, 1)) == 24
        assert int(obs.grid[CH_OOB].sum()) == 24  # 7x7 window minus 5x5 in-map part

    def test_center_sees_no_oob(self):
        world = make_world(OPEN_9, taxi=(4, 4), passenger=(8, 8), target=(7, 7))
        assert world.observe().grid[CH_OOB].sum() == 0

    def test_oob_cells_carry_no_terrain(self):
        world = make_world(OPEN_9, taxi=(0, 0), passenger=(8, 8), target=(7, 7))
        grid = world.observe().grid
        oob = grid[CH_OOB] == 1
        assert np.all(grid[CH_WALL][oob] == 0)
        assert np.all(grid[CH_WATER][oob] == 0)


class TestObjectVisibility:
    def test_passenger_four_cells_away_invisible(self):
        world = make_world(OPEN_9, taxi=(4, 0), passenger=(4, 4), target=(8, 8))
        obs = world.observe()
        assert obs.grid[CH_PASSENGER].sum() == 0

    def test_passenger_three_cells_away_visible_at_window_edge(self):
        world = make_world(OPEN_9, taxi=(4, 0), passenger=(4, 3), target=(8, 8))
        obs = world.observe()
        assert obs.grid[CH_PASSENGER, 3, 6] == 1
        assert obs.grid[CH_PASSENGER].sum() == 1

    def test_carried_passenger_not_on_grid_flag_set(self):
        world = make_world(OPEN_9, taxi=(4, 4), passenger="in_taxi", target=(4, 5))
        obs = world.observe()
        assert obs.grid[CH_PASSENGER].sum() == 0
        assert obs.flags[0] == 1 and obs.flags[1] == 0

    def test_hand_enumerated_scene(self):
        cells = list(OPEN_9)
        cells[3] = "...#....."
        cells[5] = "..~......"
        world = make_world(cells, taxi=(4, 4), passenger=(3, 5), target=(6, 6),
                           cargo=(4, 2), tasks=range(7))
        grid = world.observe().grid
        # window rows 1..7, cols 1..7; taxi at window center (3,3)
        assert grid[CH_WALL, 2, 2] == 1 and grid[CH_WALL].sum() == 1
        assert grid[CH_WATER, 4, 1] == 1 and grid[CH_WATER].sum() == 1
        assert grid[CH_PASSENGER, 2, 4] == 1
        assert grid[CH_CARGO, 3, 1] == 1
        assert grid[CH_TARGET, 5, 5] == 1
        assert grid[CH_OOB].sum() == 0

    def test_no_absolute_coordinates_leak(self):
        # same local scene at two absolute places gives identical observations
        a = make_world(["." * 12 for _ in range(12)], taxi=(4, 4), passenger=(4, 5),
                       target=(4, 6))
        b = make_world(["." * 12 for _ in range(12)], taxi=(7, 7), passenger=(7, 8),
                       target=(7, 9))
        np.testing.assert_array_equal(a.observe().grid, b.observe().grid)


class TestLocality:
    def test_changing_far_cell_leaves_observation_unchanged(self):
        rng = np.random.default_rng(0)
        from sem_a2c.env.taxi import WALL, EMPTY
        for seed in range(20):
            world = TaxiWorld.generate(seed, EnvConfig(15, 15))
            base = world.observe()
            tr, tc = world.taxi_pos
            far = [(r, c) for r in range(15) for c in range(15)
                   if max(abs(r - tr), abs(c - tc)) > 3]
            r, c = far[int(rng.integers(len(far)))]
            old = world.cells[r, c]
            world.cells[r, c] = EMPTY if old == WALL else WALL
            after = world.observe()
            world.cells[r, c] = old
            np.testing.assert_array_equal(base.grid, after.grid)
            np.testing.assert_array_equal(base.flags, after.flags)

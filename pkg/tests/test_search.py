import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sampler_bench import OccupancyGrid, astar, cell_path_cost, dijkstra_oracle, dilate_mask
from sampler_bench.search import SQRT2, step_cost

from conftest import random_grid


def _path_is_valid(grid, path, start, goal):
    assert path[0] == start and path[-1] == goal
    for (c0, r0), (c1, r1) in zip(path, path[1:]):
        assert max(abs(c1 - c0), abs(r1 - r0)) == 1
    for c, r in path:
        assert not grid.cell_occupied(c, r)


class TestAstar:
    def test_two_diagonal_steps(self):
        grid = OccupancyGrid(np.zeros((3, 3), dtype=bool))
        path = astar(grid, (0, 0), (2, 2))
        assert cell_path_cost(path) == step_cost(0, 2)
        assert math.isclose(cell_path_cost(path), 2.8284271247461903)

    def test_start_equals_goal(self):
        grid = OccupancyGrid(np.zeros((3, 3), dtype=bool))
        path = astar(grid, (1, 1), (1, 1))
        assert path == [(1, 1)]
        assert cell_path_cost(path) == 0.0

    def test_matches_dijkstra_on_random_grid(self):
        grid = random_grid(3, 20, 20, 0.25)
        free = grid.free_cell_flat
        start = (int(free[0]) % 20, int(free[0]) // 20)
        oracle = dijkstra_oracle(grid, start)
        goal = max(oracle, key=oracle.get)
        path = astar(grid, start, goal)
        _path_is_valid(grid, path, start, goal)
        assert cell_path_cost(path) == oracle[goal]

    def test_exhaustive_against_oracle_15x15(self):
        grid = random_grid(12, 15, 15, 0.3)
        free = grid.free_cell_flat
        start = (int(free[3]) % 15, int(free[3]) // 15)
        oracle = dijkstra_oracle(grid, start)
        for goal, cost in oracle.items():
            path = astar(grid, start, goal)
            assert path is not None
            assert cell_path_cost(path) == cost
        # unreachable cells give None
        reachable = set(oracle)
        for flat in free:
            cell = (int(flat) % 15, int(flat) // 15)
            if cell not in reachable:
                assert astar(grid, start, cell) is None

    def test_occupied_endpoint_rejected(self):
        occ = np.zeros((5, 5), dtype=bool)
        occ[2, 2] = True
        grid = OccupancyGrid(occ)
        with pytest.raises(ValueError):
            astar(grid, (2, 2), (0, 0))
        with pytest.raises(ValueError):
            astar(grid, (0, 0), (2, 2))

    def test_deterministic(self):
        grid = random_grid(5, 30, 30, 0.25)
        free = grid.free_cell_flat
        start = (int(free[0]) % 30, int(free[0]) // 30)
        goal = (int(free[-1]) % 30, int(free[-1]) // 30)
        assert astar(grid, start, goal) == astar(grid, start, goal)

    @given(seed=st.integers(0, 500))
    @settings(max_examples=40, deadline=None)
    def test_cost_never_increases_when_obstacle_removed(self, seed):
        rng = np.random.default_rng(seed)
        occ = rng.random((12, 12)) < 0.35
        occ[0, 0] = occ[11, 11] = False
        grid = OccupancyGrid(occ)
        before = astar(grid, (0, 0), (11, 11))
        occupied_cells = np.argwhere(occ)
        if occupied_cells.size == 0:
            return
        r, c = occupied_cells[rng.integers(len(occupied_cells))]
        occ2 = occ.copy()
        occ2[r, c] = False
        after = astar(OccupancyGrid(occ2), (0, 0), (11, 11))
        if before is not None:
            assert after is not None
            assert cell_path_cost(after) <= cell_path_cost(before)


class TestDijkstraOracle:
    def test_empty_2x2(self):
        grid = OccupancyGrid(np.zeros((2, 2), dtype=bool))
        d = dijkstra_oracle(grid, (0, 0))
        assert d[(1, 0)] == 1.0
        assert d[(0, 1)] == 1.0
        assert d[(1, 1)] == SQRT2
        assert d[(0, 0)] == 0.0

    def test_disconnected_cell_absent(self):
        occ = np.zeros((3, 3), dtype=bool)
        occ[:, 1] = True  # wall column
        grid = OccupancyGrid(occ)
        d = dijkstra_oracle(grid, (0, 0))
        assert (2, 0) not in d and (2, 2) not in d

    def test_occupied_start_rejected(self):
        occ = np.zeros((3, 3), dtype=bool)
        occ[0, 0] = True
        with pytest.raises(ValueError):
            dijkstra_oracle(OccupancyGrid(occ), (0, 0))


class TestDilateMask:
    def test_radius_zero_is_path(self):
        grid = OccupancyGrid(np.zeros((10, 10), dtype=bool))
        path = [(1, 1), (2, 2), (3, 2)]
        mask = dilate_mask(path, grid, radius=0)
        on = {(c, r) for r, c in zip(*np.nonzero(mask.cells))}
        assert on == set(path)

    def test_single_cell_radius_one(self):
        # Cells whose centers lie within distance 1: the plus-shaped disk.
        grid = OccupancyGrid(np.zeros((9, 9), dtype=bool))
        expected = {
            (4 + dc, 4 + dr)
            for dc in range(-1, 2)
            for dr in range(-1, 2)
            if math.hypot(dc, dr) <= 1.0
        }
        assert len(expected) == 5
        mask = dilate_mask([(4, 4)], grid, radius=1)
        on = {(c, r) for r, c in zip(*np.nonzero(mask.cells))}
        assert on == expected

    def test_obstacles_clipped(self):
        occ = np.zeros((10, 10), dtype=bool)
        occ[4, :] = True
        occ[4, 5] = False  # doorway
        grid = OccupancyGrid(occ)
        path = [(5, 3), (5, 4), (5, 5)]
        mask = dilate_mask(path, grid, radius=2)
        assert not (mask.cells & grid.occupied).any()

    def test_superset_of_path(self):
        grid = random_grid(8, 20, 20, 0.2)
        free = grid.free_cell_flat
        start = (int(free[0]) % 20, int(free[0]) // 20)
        d = dijkstra_oracle(grid, start)
        goal = max(d, key=d.get)
        path = astar(grid, start, goal)
        mask = dilate_mask(path, grid, radius=3)
        for c, r in path:
            assert mask.cells[r, c]

    def test_negative_radius_rejected(self):
        grid = OccupancyGrid(np.zeros((5, 5), dtype=bool))
        with pytest.raises(ValueError):
            dilate_mask([(1, 1)], grid, radius=-1)

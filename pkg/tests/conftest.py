import numpy as np
import pytest

from sampler_bench import OccupancyGrid, PlanningProblem, Point2


@pytest.fixture
def empty_grid():
    return OccupancyGrid(np.zeros((64, 64), dtype=bool))


@pytest.fixture
def empty_grid_224():
    return OccupancyGrid(np.zeros((224, 224), dtype=bool))


def random_grid(seed: int, width: int, height: int, fill: float) -> OccupancyGrid:
    rng = np.random.default_rng(seed)
    return OccupancyGrid(rng.random((height, width)) < fill)


def make_problem(grid: OccupancyGrid, start=(5.5, 5.5), goal=(58.5, 58.5)) -> PlanningProblem:
    return PlanningProblem(grid, Point2(*start), Point2(*goal))

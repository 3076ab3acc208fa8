import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sampler_bench import (
    Density,
    FormatError,
    InfeasibleProblemError,
    OccupancyGrid,
    Point2,
    generate_map,
    is_free,
    load_map,
    sample_problem,
    save_map,
    segment_collision_free,
)
from sampler_bench.grid_map import DENSITY_BANDS

from conftest import random_grid


class TestGenerateMap:
    def test_deterministic(self):
        a = generate_map(7, Density.SPARSE, 224, 224)
        b = generate_map(7, Density.SPARSE, 224, 224)
        assert a == b

    @pytest.mark.parametrize("density", list(Density))
    @pytest.mark.parametrize("seed", [0, 7, 123])
    def test_fraction_in_band(self, density, seed):
        grid = generate_map(seed, density, 224, 224)
        lo, hi = DENSITY_BANDS[density]
        assert lo <= grid.occupied_fraction() <= hi

    def test_fraction_in_band_small_maps(self):
        for density in Density:
            grid = generate_map(5, density, 32, 48)
            lo, hi = DENSITY_BANDS[density]
            assert lo <= grid.occupied_fraction() <= hi

    def test_below_minimum_rejected(self):
        with pytest.raises(ValueError):
            generate_map(1, Density.SPARSE, 16, 16)

    @pytest.mark.parametrize("density", [Density.MEDIUM, Density.DENSE])
    def test_contains_concave_obstacle(self, density):
        # A concave component's filled convex hull strictly exceeds it.
        from scipy import ndimage
        from skimage.morphology import convex_hull_image

        grid = generate_map(11, density, 224, 224)
        labels, n = ndimage.label(grid.occupied)
        ratios = []
        for i in range(1, n + 1):
            comp = labels == i
            area = comp.sum()
            if area < 12:
                continue
            hull = convex_hull_image(comp).sum()
            ratios.append(hull / area)
        assert max(ratios) > 1.3


class TestSampleProblem:
    def test_empty_grid_separation(self):
        grid = OccupancyGrid(np.zeros((224, 224), dtype=bool))
        p = sample_problem(grid, 3, min_separation=100.0)
        assert p.start.dist_to(p.goal) >= 100.0

    def test_fully_occupied(self):
        grid = OccupancyGrid(np.ones((40, 40), dtype=bool))
        with pytest.raises(InfeasibleProblemError):
            sample_problem(grid, 3, min_separation=1.0)

    def test_deterministic(self):
        grid = generate_map(2, Density.MEDIUM, 128, 128)
        a = sample_problem(grid, 9, min_separation=60.0)
        b = sample_problem(grid, 9, min_separation=60.0)
        assert a.start == b.start and a.goal == b.goal

    def test_disconnected_halves_unreachable_pair(self):
        # A full wall: pairs straddling it are infeasible, the budget runs out
        # if min_separation forces straddling.
        occ = np.zeros((64, 64), dtype=bool)
        occ[:, 30:34] = True
        grid = OccupancyGrid(occ)
        with pytest.raises(InfeasibleProblemError):
            sample_problem(grid, 0, min_separation=50.0)

    def test_feasibility_guarantee(self):
        from sampler_bench import astar

        for seed in range(5):
            grid = generate_map(seed, Density.DENSE, 160, 160)
            p = sample_problem(grid, seed, min_separation=80.0)
            assert astar(grid, p.start.cell(), p.goal.cell()) is not None


class TestIsFree:
    def test_inside_free(self, empty_grid):
        assert is_free(empty_grid, Point2(5.5, 5.5))

    def test_out_of_bounds(self, empty_grid):
        assert not is_free(empty_grid, Point2(-1.0, 0.0))
        assert not is_free(empty_grid, Point2(64.0, 5.0))

    def test_occupied_cell_lookup(self):
        occ = np.zeros((10, 10), dtype=bool)
        occ[4, 3] = True  # cell (col=3, row=4)
        grid = OccupancyGrid(occ)
        assert not is_free(grid, Point2(3.2, 4.9))
        assert is_free(grid, Point2(2.9, 4.9))


class TestSegmentCollisionFree:
    def test_empty(self, empty_grid):
        assert segment_collision_free(empty_grid, Point2(1, 1), Point2(10, 10))

    def test_wall_blocks(self):
        occ = np.zeros((20, 20), dtype=bool)
        occ[:, 10] = True
        grid = OccupancyGrid(occ)
        assert not segment_collision_free(grid, Point2(2, 5), Point2(18, 5))

    def test_degenerate_segment(self, empty_grid):
        p = Point2(3.3, 4.4)
        assert segment_collision_free(empty_grid, p, p)

    def test_out_of_bounds_endpoint(self, empty_grid):
        assert not segment_collision_free(empty_grid, Point2(5, 5), Point2(70, 5))

    @given(
        seed=st.integers(0, 1000),
        ax=st.floats(-2, 34), ay=st.floats(-2, 34),
        bx=st.floats(-2, 34), by=st.floats(-2, 34),
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetry(self, seed, ax, ay, bx, by):
        grid = random_grid(seed, 32, 32, 0.3)
        a, b = Point2(ax, ay), Point2(bx, by)
        assert segment_collision_free(grid, a, b) == segment_collision_free(grid, b, a)

    @given(
        seed=st.integers(0, 1000),
        ax=st.floats(0, 31.9), ay=st.floats(0, 31.9),
        bx=st.floats(0, 31.9), by=st.floats(0, 31.9),
    )
    @settings(max_examples=200, deadline=None)
    def test_free_segment_implies_free_endpoints(self, seed, ax, ay, bx, by):
        grid = random_grid(seed, 32, 32, 0.3)
        a, b = Point2(ax, ay), Point2(bx, by)
        if segment_collision_free(grid, a, b):
            assert is_free(grid, a) and is_free(grid, b)


class TestMapIO:
    def test_round_trip(self, tmp_path):
        for density in Density:
            grid = generate_map(3, density, 48, 64)
            path = tmp_path / f"{density.value}.json"
            save_map(grid, path)
            assert load_map(path) == grid

    def test_truncated_file(self, tmp_path):
        grid = generate_map(3, Density.SPARSE, 32, 32)
        path = tmp_path / "m.json"
        save_map(grid, path)
        blob = path.read_text()
        path.write_text(blob[: len(blob) // 2])
        with pytest.raises(FormatError):
            load_map(path)

    def test_zero_width_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"format": "gridmap/1", "width": 0, "height": 2, "rows": ["", ""]}))
        with pytest.raises(FormatError):
            load_map(path)

    def test_bad_characters_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"format": "gridmap/1", "width": 2, "height": 1, "rows": ["2x"]}))
        with pytest.raises(FormatError):
            load_map(path)

    def test_wrong_row_length_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"format": "gridmap/1", "width": 3, "height": 1, "rows": ["01"]}))
        with pytest.raises(FormatError):
            load_map(path)


class TestPoint2:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Point2(math.nan, 0.0)
        with pytest.raises(ValueError):
            Point2(0.0, math.inf)

    def test_cell(self):
        assert Point2(3.7, 4.2).cell() == (3, 4)
        assert Point2(-0.5, 1.0).cell() == (-1, 1)

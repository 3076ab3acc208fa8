import json
from collections import Counter

import numpy as np

from sampler_bench import Density, generate_dataset, load_map, load_mask
from sampler_bench.search import astar, dilate_mask


class TestGenerateDataset:
    def test_even_density_split(self, tmp_path):
        manifest = generate_dataset(
            0, 6, list(Density), tmp_path, width=96, height=96, min_separation=40.0
        )
        counts = Counter(s["density"] for s in manifest["samples"])
        assert counts == {"sparse": 2, "medium": 2, "dense": 2}

    def test_samples_validate_and_regenerate(self, tmp_path):
        manifest = generate_dataset(
            3, 4, [Density.SPARSE, Density.DENSE], tmp_path, width=96, height=96,
            min_separation=40.0,
        )
        for s in manifest["samples"]:
            grid = load_map(tmp_path / s["map"])
            mask = load_mask(tmp_path / s["label"])
            assert (mask.width, mask.height) == (grid.width, grid.height)
            # on-cells are free cells of the paired map
            assert not (mask.cells & grid.occupied).any()
            # label regenerates bit-identically from (map, start, goal)
            path = astar(grid, tuple(s["start"]), tuple(s["goal"]))
            assert path is not None
            again = dilate_mask(path, grid, radius=3)
            assert (again.cells == mask.cells).all()

    def test_deterministic_manifest(self, tmp_path):
        m1 = generate_dataset(9, 3, [Density.SPARSE], tmp_path / "a", width=96, height=96,
                              min_separation=40.0)
        m2 = generate_dataset(9, 3, [Density.SPARSE], tmp_path / "b", width=96, height=96,
                              min_separation=40.0)
        assert m1 == m2
        for s in m1["samples"]:
            assert (tmp_path / "a" / s["map"]).read_bytes() == (
                tmp_path / "b" / s["map"]
            ).read_bytes()
            assert (tmp_path / "a" / s["label"]).read_bytes() == (
                tmp_path / "b" / s["label"]
            ).read_bytes()

    def test_manifest_file_matches_return(self, tmp_path):
        manifest = generate_dataset(1, 2, [Density.MEDIUM], tmp_path, width=96, height=96,
                                    min_separation=40.0)
        on_disk = json.loads((tmp_path / "manifest.json").read_text())
        assert on_disk == manifest
        assert on_disk["format"] == "dataset/1"

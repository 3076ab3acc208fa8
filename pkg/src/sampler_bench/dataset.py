"""Training-corpus generation: maps, start/goal pairs, dilated label masks."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .bench import derive_seed
from .grid_map import Density, generate_map, sample_problem, save_map
from .prior import save_mask
from .search import astar, dilate_mask

MANIFEST_FORMAT = "dataset/1"


def generate_dataset(
    seed: int,
    count: int,
    densities: Sequence[Density],
    out_dir,
    width: int = 224,
    height: int = 224,
    min_separation: float = 100.0,
    dilation_radius: float = 3.0,
) -> dict:
    """Emit `count` (map, start/goal, label) triples plus a manifest.

    Samples round-robin over densities; every sample is feasible by
    construction and the label regenerates from (map, start, goal).
    Returns the manifest document; also writes it to out_dir/manifest.json.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    densities = [Density(d) for d in densities]
    if not densities:
        raise ValueError("need at least one density")
    out = Path(out_dir)
    (out / "maps").mkdir(parents=True, exist_ok=True)
    (out / "labels").mkdir(parents=True, exist_ok=True)

    samples = []
    for i in range(count):
        density = densities[i % len(densities)]
        grid = generate_map(derive_seed(seed, "map", i), density, width, height)
        problem = sample_problem(grid, derive_seed(seed, "problem", i), min_separation)
        start_cell = problem.start.cell()
        goal_cell = problem.goal.cell()
        path = astar(grid, start_cell, goal_cell)
        mask = dilate_mask(path, grid, dilation_radius)
        map_rel = f"maps/{i:05d}.json"
        label_rel = f"labels/{i:05d}.npri"
        save_map(grid, out / map_rel)
        save_mask(mask, out / label_rel)
        samples.append(
            {
                "map": map_rel,
                "label": label_rel,
                "start": list(start_cell),
                "goal": list(goal_cell),
                "density": density.value,
            }
        )

    manifest = {"format": MANIFEST_FORMAT, "samples": samples}
    with open(out / "manifest.json", "w", encoding="ascii") as f:
        json.dump(manifest, f, separators=(",", ":"))
        f.write("\n")
    return manifest

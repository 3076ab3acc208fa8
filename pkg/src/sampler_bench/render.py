"""Deterministic SVG composites of grids, trees, paths, priors, ellipses.

One SVG user unit = one grid cell; row 0 renders at the top. Output is a
pure function of the scene, so identical scenes give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grid_map import OccupancyGrid, Point2
from .planner import Tree
from .prior import InformedEllipse, ProbabilityMap

PALETTE = {
    "background": "#ffffff",
    "obstacle": "#2b2b2b",
    "prior": "#ff8c00",  # orange guidance cells
    "tree": "#7aa6c2",
    "path": "#1460aa",
    "ellipse": "#ff00ff",  # dashed magenta
    "start": "#d62728",  # red
    "goal": "#2ca02c",  # green
    "sample": "#ff8c00",
}


@dataclass
class SceneSpec:
    grid: OccupancyGrid
    tree: Optional[Tree] = None
    path: Optional[Sequence[Point2]] = None
    prior: Optional[ProbabilityMap] = None
    ellipse: Optional[InformedEllipse] = None
    samples: Optional[Sequence[Point2]] = None
    show_grid: bool = True
    show_tree: bool = True
    show_path: bool = True
    show_prior: bool = True
    show_ellipse: bool = True
    tree_stroke: float = 0.3
    path_stroke: float = 1.2
    ellipse_stroke: float = 0.8
    marker_radius: float = 2.5
    prior_max_opacity: float = 0.85

    def __post_init__(self):
        if self.prior is not None and (
            self.prior.width != self.grid.width or self.prior.height != self.grid.height
        ):
            raise ValueError("prior dimensions do not match the grid")


def _f(v: float) -> str:
    """Fixed 3-decimal float formatting keeps the output byte-stable."""
    return f"{v:.3f}"


def _obstacle_rects(grid: OccupancyGrid) -> list[str]:
    """Merge occupied runs per row into single rects."""
    out = []
    occ = grid.occupied
    for r in range(grid.height):
        row = occ[r]
        c = 0
        while c < grid.width:
            if row[c]:
                c0 = c
                while c < grid.width and row[c]:
                    c += 1
                out.append(
                    f'<rect x="{c0}" y="{r}" width="{c - c0}" height="1" '
                    f'fill="{PALETTE["obstacle"]}"/>'
                )
            else:
                c += 1
    return out


def _prior_cells(prior: ProbabilityMap, max_opacity: float) -> list[str]:
    out = []
    w = prior.weights
    wmax = float(w.max())
    if wmax <= 0:
        return out
    rows, cols = np.nonzero(w > 0)
    for r, c in zip(rows.tolist(), cols.tolist()):
        opacity = max_opacity * float(w[r, c]) / wmax
        out.append(
            f'<rect x="{c}" y="{r}" width="1" height="1" fill="{PALETTE["prior"]}" '
            f'fill-opacity="{_f(opacity)}"/>'
        )
    return out


def _tree_path_data(tree: Tree) -> str:
    parts = []
    for i in range(1, tree.size):
        p = tree.point(i)
        q = tree.point(tree.parent(i))
        parts.append(f"M{_f(q.x)} {_f(q.y)}L{_f(p.x)} {_f(p.y)}")
    return "".join(parts)


def render_svg(spec: SceneSpec) -> str:
    w, h = spec.grid.width, spec.grid.height
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" '
        f'width="{4 * w}" height="{4 * h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="{PALETTE["background"]}"/>',
    ]
    if spec.show_prior and spec.prior is not None:
        parts.extend(_prior_cells(spec.prior, spec.prior_max_opacity))
    if spec.show_grid:
        parts.extend(_obstacle_rects(spec.grid))
    if spec.show_tree and spec.tree is not None and spec.tree.size > 1:
        parts.append(
            f'<path d="{_tree_path_data(spec.tree)}" fill="none" '
            f'stroke="{PALETTE["tree"]}" stroke-width="{_f(spec.tree_stroke)}"/>'
        )
    if spec.samples:
        for p in spec.samples:
            parts.append(
                f'<circle cx="{_f(p.x)}" cy="{_f(p.y)}" r="0.6" fill="{PALETTE["sample"]}"/>'
            )
    if spec.show_ellipse and spec.ellipse is not None:
        e = spec.ellipse
        c = e.center
        deg = math.degrees(e.rotation)
        parts.append(
            f'<ellipse cx="{_f(c.x)}" cy="{_f(c.y)}" rx="{_f(e.semi_major)}" '
            f'ry="{_f(e.semi_minor)}" '
            f'transform="rotate({_f(deg)} {_f(c.x)} {_f(c.y)})" fill="none" '
            f'stroke="{PALETTE["ellipse"]}" stroke-width="{_f(spec.ellipse_stroke)}" '
            f'stroke-dasharray="3 2"/>'
        )
    if spec.show_path and spec.path:
        pts = " ".join(f"{_f(p.x)},{_f(p.y)}" for p in spec.path)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{PALETTE["path"]}" '
            f'stroke-width="{_f(spec.path_stroke)}" stroke-linejoin="round"/>'
        )
        start, goal = spec.path[0], spec.path[-1]
        parts.append(
            f'<circle cx="{_f(start.x)}" cy="{_f(start.y)}" r="{_f(spec.marker_radius)}" '
            f'fill="{PALETTE["start"]}"/>'
        )
        parts.append(
            f'<circle cx="{_f(goal.x)}" cy="{_f(goal.y)}" r="{_f(spec.marker_radius)}" '
            f'fill="{PALETTE["goal"]}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_scene(spec: SceneSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(render_svg(spec))

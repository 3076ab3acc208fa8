"""Grid search: A* for labels and feasibility, a Dijkstra oracle, path masks.

Costs live on the 8-connected free-cell graph: straight steps cost 1,
diagonal steps sqrt(2). Per-cell costs are tracked as exact step counts and
converted to float canonically (a + b*sqrt(2)), so two searches that find
the same optimal cost produce bit-identical floats.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .grid_map import OccupancyGrid

SQRT2 = math.sqrt(2.0)

# (dcol, drow, diagonal)
_STEPS = (
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
    (1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1),
)

Cell = tuple[int, int]
CellPath = list[Cell]


@dataclass(frozen=True)
class PathMask:
    """Binary raster marking cells near a path; same shape as its grid."""

    cells: np.ndarray  # (height, width) bool

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def on_count(self) -> int:
        return int(self.cells.sum())


def step_cost(straight: int, diagonal: int) -> float:
    """Canonical float cost of a step-count pair."""
    return straight + diagonal * SQRT2


def cell_path_cost(path: CellPath) -> float:
    straight = diagonal = 0
    for (c0, r0), (c1, r1) in zip(path, path[1:]):
        if c0 != c1 and r0 != r1:
            diagonal += 1
        else:
            straight += 1
    return step_cost(straight, diagonal)


def _check_endpoint(grid: OccupancyGrid, cell: Cell, name: str) -> None:
    col, row = cell
    if not (0 <= col < grid.width and 0 <= row < grid.height):
        raise ValueError(f"{name} cell {cell} outside {grid.width}x{grid.height} grid")
    if grid.cell_occupied(col, row):
        raise ValueError(f"{name} cell {cell} is occupied")


def astar(grid: OccupancyGrid, start_cell: Cell, goal_cell: Cell) -> CellPath | None:
    """Minimal-cost 8-connected path, octile heuristic, or None if disconnected.

    Ties on f are expanded lowest flat index (row*width+col) first.
    """
    _check_endpoint(grid, start_cell, "start")
    _check_endpoint(grid, goal_cell, "goal")
    w, h = grid.width, grid.height
    occ = grid.occupied.tobytes()  # flat row-major, 1 byte per cell
    start = start_cell[1] * w + start_cell[0]
    goal = goal_cell[1] * w + goal_cell[0]
    gc, gr = goal_cell

    n = w * h
    g = [math.inf] * n
    steps = [None] * n  # (straight, diagonal) counts of the best-known route
    parent = [-1] * n
    closed = bytearray(n)
    push = heapq.heappush
    pop = heapq.heappop

    def octile(col: int, row: int) -> float:
        dc = abs(col - gc)
        dr = abs(row - gr)
        if dc < dr:
            dc, dr = dr, dc
        return (dc - dr) + dr * SQRT2

    g[start] = 0.0
    steps[start] = (0, 0)
    heap = [(octile(start_cell[0], start_cell[1]), start, 0, 0)]
    while heap:
        _, flat, a, b = pop(heap)
        if closed[flat] or (a, b) != steps[flat]:
            continue
        closed[flat] = 1
        if flat == goal:
            break
        row, col = divmod(flat, w)
        for dc, dr, diag in _STEPS:
            c2 = col + dc
            r2 = row + dr
            if c2 < 0 or r2 < 0 or c2 >= w or r2 >= h:
                continue
            f2 = r2 * w + c2
            if occ[f2] or closed[f2]:
                continue
            na = a + 1 - diag
            nb = b + diag
            ng = na + nb * SQRT2
            if ng < g[f2]:
                g[f2] = ng
                steps[f2] = (na, nb)
                parent[f2] = flat
                push(heap, (ng + octile(c2, r2), f2, na, nb))

    if not closed[goal]:
        return None
    flat_path = [goal]
    while flat_path[-1] != start:
        flat_path.append(parent[flat_path[-1]])
    flat_path.reverse()
    return [(f % w, f // w) for f in flat_path]


def dijkstra_oracle(grid: OccupancyGrid, start_cell: Cell) -> dict[Cell, float]:
    """Exact single-source costs over the 8-connected free-cell graph.

    Brute-force reference, deliberately independent of astar: plain dicts,
    no heuristic, no arrays.
    """
    _check_endpoint(grid, start_cell, "start")
    w, h = grid.width, grid.height
    counts: dict[Cell, tuple[int, int]] = {start_cell: (0, 0)}
    dist: dict[Cell, float] = {start_cell: 0.0}
    done: set[Cell] = set()
    heap: list[tuple[float, int, int, int, int]] = [(0.0, start_cell[0], start_cell[1], 0, 0)]
    while heap:
        d, col, row, a, b = heapq.heappop(heap)
        cell = (col, row)
        if cell in done or counts.get(cell) != (a, b):
            continue
        done.add(cell)
        for dc, dr, diag in _STEPS:
            c2, r2 = col + dc, row + dr
            if not (0 <= c2 < w and 0 <= r2 < h) or grid.cell_occupied(c2, r2):
                continue
            nxt = (c2, r2)
            if nxt in done:
                continue
            na, nb = a + (1 - diag), b + diag
            nd = step_cost(na, nb)
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                counts[nxt] = (na, nb)
                heapq.heappush(heap, (nd, c2, r2, na, nb))
    return dist


def dilate_mask(path: CellPath, grid: OccupancyGrid, radius: float = 3.0) -> PathMask:
    """Euclidean dilation of a cell path, clipped to free cells.

    A cell turns on iff its center is within `radius` (center to center) of
    some path cell and the cell is free.
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    h, w = grid.height, grid.width
    mask = np.zeros((h, w), dtype=bool)
    r_int = int(math.floor(radius))
    offsets = [
        (dr, dc)
        for dr in range(-r_int, r_int + 1)
        for dc in range(-r_int, r_int + 1)
        if dr * dr + dc * dc <= radius * radius + 1e-9
    ]
    for col, row in path:
        for dr, dc in offsets:
            r2, c2 = row + dr, col + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                mask[r2, c2] = True
    mask &= ~grid.occupied
    return PathMask(mask)

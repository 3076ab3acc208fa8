"""Occupancy grids, procedural obstacle maps, and collision queries.

World coordinates are in cell units: cell (col, row) covers
[col, col+1) x [row, row+1). Grids are stored row-major, row 0 at y=0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FormatError, InfeasibleProblemError

MIN_MAP_SIDE = 32

MAP_FORMAT = "gridmap/1"


class Density(str, Enum):
    SPARSE = "sparse"
    MEDIUM = "medium"
    DENSE = "dense"


# Occupied-area fraction bands per density. The source tables only name the
# three categories, so the bands are our calibration; override via arguments.
DENSITY_BANDS: dict[Density, tuple[float, float]] = {
    Density.SPARSE: (0.02, 0.08),
    Density.MEDIUM: (0.10, 0.18),
    Density.DENSE: (0.22, 0.32),
}


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def dist_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def cell(self) -> tuple[int, int]:
        """(col, row) of the cell containing this point."""
        return (int(math.floor(self.x)), int(math.floor(self.y)))


class OccupancyGrid:
    """Binary free/occupied raster. Immutable after construction."""

    __slots__ = ("_occ", "_free_flat")

    def __init__(self, occupied: np.ndarray):
        occ = np.ascontiguousarray(occupied, dtype=bool)
        if occ.ndim != 2 or occ.shape[0] < 1 or occ.shape[1] < 1:
            raise ValueError(f"grid must be a non-empty 2d raster, got shape {occ.shape}")
        occ.setflags(write=False)
        self._occ = occ
        self._free_flat = None

    @property
    def width(self) -> int:
        return self._occ.shape[1]

    @property
    def height(self) -> int:
        return self._occ.shape[0]

    @property
    def occupied(self) -> np.ndarray:
        """(height, width) bool array, True = occupied. Read-only view."""
        return self._occ

    @property
    def free_cell_flat(self) -> np.ndarray:
        """Flat indices (row*width+col) of free cells, ascending. Cached."""
        if self._free_flat is None:
            flat = np.nonzero(~self._occ.ravel())[0]
            flat.setflags(write=False)
            self._free_flat = flat
        return self._free_flat

    def occupied_fraction(self) -> float:
        return float(self._occ.sum()) / (self.width * self.height)

    def cell_occupied(self, col: int, row: int) -> bool:
        return bool(self._occ[row, col])

    def __eq__(self, other):
        return isinstance(other, OccupancyGrid) and np.array_equal(self._occ, other._occ)

    def __hash__(self):
        return hash((self.width, self.height, self._occ.tobytes()))

    def __repr__(self):
        return f"OccupancyGrid({self.width}x{self.height}, {self.occupied_fraction():.1%} occupied)"


@dataclass(frozen=True)
class PlanningProblem:
    grid: OccupancyGrid
    start: Point2
    goal: Point2

    def __post_init__(self):
        if not is_free(self.grid, self.start):
            raise ValueError(f"start {self.start} is not in free space")
        if not is_free(self.grid, self.goal):
            raise ValueError(f"goal {self.goal} is not in free space")
        if self.start == self.goal:
            raise ValueError("start and goal must differ")


def is_free(grid: OccupancyGrid, p: Point2) -> bool:
    """True iff p is inside the grid and its containing cell is free."""
    col = math.floor(p.x)
    row = math.floor(p.y)
    if col < 0 or row < 0 or col >= grid.width or row >= grid.height:
        return False
    return not grid._occ[int(row), int(col)]


def segment_collision_free(grid: OccupancyGrid, a: Point2, b: Point2, spacing: float = 0.25) -> bool:
    """Check a straight segment by supersampling at most `spacing` apart.

    Samples are generated from the lexicographically smaller endpoint so the
    check is exactly symmetric in (a, b).
    """
    if (b.x, b.y) < (a.x, a.y):
        a, b = b, a
    dx = b.x - a.x
    dy = b.y - a.y
    dist = math.hypot(dx, dy)
    n = max(1, math.ceil(dist / spacing))
    t = np.arange(n + 1) / n
    cols = np.floor(a.x + t * dx)
    rows = np.floor(a.y + t * dy)
    if cols.min() < 0 or rows.min() < 0 or cols.max() >= grid.width or rows.max() >= grid.height:
        return False
    return not grid._occ[rows.astype(np.intp), cols.astype(np.intp)].any()


def _rect_patch(rng, lo: int, hi: int) -> np.ndarray:
    w = int(rng.integers(lo, hi + 1))
    h = int(rng.integers(lo, hi + 1))
    return np.ones((h, w), dtype=bool)


def _circle_patch(rng, lo: int, hi: int) -> np.ndarray:
    r = int(rng.integers(lo, hi + 1))
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    return (xx * xx + yy * yy) <= r * r


def _concave_patch(rng, lo: int, hi: int) -> np.ndarray:
    """L- or U-shaped polyomino built from overlapping bars."""
    arm = int(rng.integers(max(lo * 2, 6), max(hi * 2, 8) + 1))
    t = max(2, int(rng.integers(max(2, lo // 2), max(3, hi // 2) + 1)))
    t = min(t, arm - 2)
    patch = np.zeros((arm, arm), dtype=bool)
    if rng.random() < 0.5:  # L
        patch[:, :t] = True
        patch[-t:, :] = True
    else:  # U
        patch[:, :t] = True
        patch[:, -t:] = True
        patch[-t:, :] = True
    k = int(rng.integers(0, 4))
    return np.rot90(patch, k)


def generate_map(seed: int, density: Density, width: int = 224, height: int = 224) -> OccupancyGrid:
    """Procedurally generate an obstacle map; pure function of its arguments.

    Rectangles and discs give convex obstacles; medium and dense maps always
    contain at least one concave (L/U) shape. A placement gap keeps obstacles
    apart so free space stays navigable. The occupied fraction lands inside
    the density band.
    """
    density = Density(density)
    if width < MIN_MAP_SIDE or height < MIN_MAP_SIDE:
        raise ValueError(f"map dimensions must be at least {MIN_MAP_SIDE}, got {width}x{height}")
    rng = np.random.default_rng(seed % (1 << 64))
    lo_frac, hi_frac = DENSITY_BANDS[density]
    total = width * height
    occ = np.zeros((height, width), dtype=bool)

    base = min(width, height)
    gap = 3 if base >= 128 else 2
    # Larger blocks for denser maps keep random packing able to hit the band.
    size_lo = max(3, base // 20)
    size_hi = max(size_lo + 2, base // (7 if density is Density.SPARSE else 5))

    target = rng.uniform(lo_frac, hi_frac)
    need_concave = density in (Density.MEDIUM, Density.DENSE)

    def try_place(patch: np.ndarray) -> bool:
        ph, pw = patch.shape
        if ph > height or pw > width:
            return False
        r0 = int(rng.integers(0, height - ph + 1))
        c0 = int(rng.integers(0, width - pw + 1))
        count = int(patch.sum())
        if (occ.sum() + count) / total > hi_frac:
            return False
        rlo, rhi = max(0, r0 - gap), min(height, r0 + ph + gap)
        clo, chi = max(0, c0 - gap), min(width, c0 + pw + gap)
        if occ[rlo:rhi, clo:chi].any():
            return False
        occ[r0 : r0 + ph, c0 : c0 + pw] |= patch
        return True

    attempts = 0
    while occ.sum() / total < target and attempts < 4000:
        attempts += 1
        if need_concave:
            patch = _concave_patch(rng, size_lo, size_hi)
        else:
            kind = rng.random()
            if kind < 0.45:
                patch = _rect_patch(rng, size_lo, size_hi)
            elif kind < 0.85:
                patch = _circle_patch(rng, max(2, size_lo // 2), max(3, size_hi // 2))
            else:
                patch = _concave_patch(rng, size_lo, size_hi)
        if try_place(patch) and need_concave:
            need_concave = False

    # Fallback filler: small blocks cannot overshoot the band's upper edge.
    tight_gap = max(1, gap - 1)
    attempts = 0
    while occ.sum() / total < lo_frac and attempts < 20000:
        attempts += 1
        side = int(rng.integers(1, 4))
        r0 = int(rng.integers(0, height - side + 1))
        c0 = int(rng.integers(0, width - side + 1))
        rlo, rhi = max(0, r0 - tight_gap), min(height, r0 + side + tight_gap)
        clo, chi = max(0, c0 - tight_gap), min(width, c0 + side + tight_gap)
        if occ[rlo:rhi, clo:chi].any():
            continue
        occ[r0 : r0 + side, c0 : c0 + side] = True

    return OccupancyGrid(occ)


def sample_problem(
    grid: OccupancyGrid,
    seed: int,
    min_separation: float,
    retry_budget: int = 100,
    edge_margin: float = 10.0,
) -> PlanningProblem:
    """Draw a feasible start/goal pair at least min_separation apart.

    Feasibility is verified with the grid search oracle; raises
    InfeasibleProblemError when the retry budget runs out. Endpoints keep
    edge_margin cells away from the map border (goal regions clipped by the
    border starve uniform samplers); the margin shrinks on small maps and is
    dropped entirely if it leaves fewer than two candidate cells.
    """
    from .search import astar  # deferred: search depends on this module

    free = grid.free_cell_flat
    if free.size < 2:
        raise InfeasibleProblemError("grid has fewer than two free cells")
    margin = int(min(edge_margin, min(grid.width, grid.height) // 8))
    if margin > 0:
        rows, cols = np.divmod(free, grid.width)
        inner = free[
            (cols >= margin)
            & (cols < grid.width - margin)
            & (rows >= margin)
            & (rows < grid.height - margin)
        ]
        if inner.size >= 2:
            free = inner
    rng = np.random.default_rng(seed % (1 << 64))
    for _ in range(retry_budget):
        i, j = rng.integers(0, free.size, size=2)
        if i == j:
            continue
        sr, sc = divmod(int(free[i]), grid.width)
        gr, gc = divmod(int(free[j]), grid.width)
        if math.hypot(gc - sc, gr - sr) < min_separation:
            continue
        if astar(grid, (sc, sr), (gc, gr)) is None:
            continue
        return PlanningProblem(grid, Point2(sc + 0.5, sr + 0.5), Point2(gc + 0.5, gr + 0.5))
    raise InfeasibleProblemError(
        f"no feasible pair at separation >= {min_separation} within {retry_budget} tries"
    )


def save_map(grid: OccupancyGrid, path) -> None:
    rows = ["".join("1" if v else "0" for v in row) for row in grid.occupied]
    doc = {"format": MAP_FORMAT, "width": grid.width, "height": grid.height, "rows": rows}
    with open(path, "w", encoding="ascii") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")


def load_map(path) -> OccupancyGrid:
    with open(path, "r", encoding="ascii") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    if not isinstance(doc, dict) or doc.get("format") != MAP_FORMAT:
        raise FormatError(f"{path}: missing or unknown format marker (expected {MAP_FORMAT!r})")
    width, height, rows = doc.get("width"), doc.get("height"), doc.get("rows")
    if not isinstance(width, int) or not isinstance(height, int) or width < 1 or height < 1:
        raise FormatError(f"{path}: width/height must be positive integers")
    if not isinstance(rows, list) or len(rows) != height:
        raise FormatError(f"{path}: expected {height} rows, got {len(rows) if isinstance(rows, list) else 'none'}")
    occ = np.zeros((height, width), dtype=bool)
    for r, line in enumerate(rows):
        if not isinstance(line, str) or len(line) != width:
            raise FormatError(f"{path}: row {r} must be a string of length {width}")
        bad = set(line) - {"0", "1"}
        if bad:
            raise FormatError(f"{path}: row {r} contains invalid characters {sorted(bad)}")
        occ[r] = np.frombuffer(line.encode("ascii"), dtype=np.uint8) == ord("1")
    return OccupancyGrid(occ)

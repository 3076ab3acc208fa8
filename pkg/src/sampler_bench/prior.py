"""Sampling priors: probability maps, mixture sampling, informed ellipse.

The mixture rule draws from the prior with probability alpha and uniformly
from free space otherwise; after a first solution the informed sampler keeps
only draws inside the ellipse whose foci are start and goal and whose major
axis equals the best cost found so far.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    EllipseExhaustedError,
    EmptyFreeSpaceError,
    EmptyPriorError,
    FormatError,
    InfeasibleProblemError,
)
from .grid_map import OccupancyGrid, PlanningProblem, Point2, is_free
from .search import PathMask, astar, dilate_mask

NPRI_MAGIC = b"NPRI"
KIND_PRIOR = 0x01
KIND_MASK = 0x02
_SUM_TOLERANCE = 1e-4


class ProbabilityMap:
    """Per-cell sampling weights: non-negative, zero on occupied, sum 1."""

    __slots__ = ("_weights", "_cumsum")

    def __init__(self, weights: np.ndarray, grid: OccupancyGrid):
        w = np.ascontiguousarray(weights, dtype=np.float64)
        if w.shape != (grid.height, grid.width):
            raise ValueError(f"weights shape {w.shape} does not match grid {grid.height}x{grid.width}")
        if not np.isfinite(w).all() or (w < 0).any():
            raise ValueError("weights must be finite and non-negative")
        if w[grid.occupied].any():
            raise ValueError("weights must be zero on occupied cells")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"weights must sum to 1 +- 1e-6, got {total}")
        w.setflags(write=False)
        self._weights = w
        self._cumsum = None

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def width(self) -> int:
        return self._weights.shape[1]

    @property
    def height(self) -> int:
        return self._weights.shape[0]

    def _cell_cdf(self) -> np.ndarray:
        if self._cumsum is None:
            self._cumsum = np.cumsum(self._weights.ravel())
        return self._cumsum

    def draw_cell_flat(self, u: float) -> int:
        """Flat cell index at quantile u of the cell distribution."""
        cdf = self._cell_cdf()
        return int(np.searchsorted(cdf, u * cdf[-1], side="right"))


def normalize(mask_or_weights, grid: OccupancyGrid) -> ProbabilityMap:
    """Zero weights on occupied cells and rescale to a distribution."""
    if isinstance(mask_or_weights, PathMask):
        raw = mask_or_weights.cells.astype(np.float64)
    else:
        raw = np.ascontiguousarray(mask_or_weights, dtype=np.float64)
    if raw.shape != (grid.height, grid.width):
        raise ValueError(f"weights shape {raw.shape} does not match grid {grid.height}x{grid.width}")
    if not np.isfinite(raw).all() or (raw < 0).any():
        raise ValueError("weights must be finite and non-negative")
    masked = np.where(grid.occupied, 0.0, raw)
    total = masked.sum()
    if total <= 0.0:
        raise EmptyPriorError("no positive weight on any free cell")
    return ProbabilityMap(masked / total, grid)


def oracle_prior(problem: PlanningProblem, radius: float = 3.0) -> ProbabilityMap:
    """Ground-truth prior: dilated optimal grid path, normalized.

    Stands in for a perfect model prediction.
    """
    path = astar(problem.grid, problem.start.cell(), problem.goal.cell())
    if path is None:
        raise InfeasibleProblemError("start and goal are disconnected on the grid")
    return normalize(dilate_mask(path, problem.grid, radius), problem.grid)


@dataclass(frozen=True)
class SamplerConfig:
    alpha: float = 0.5
    max_rejections: int = 100

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be positive")


def _draw_mixture(p: ProbabilityMap | None, grid: OccupancyGrid, alpha: float, rng) -> Point2:
    """One draw of alpha*P + (1-alpha)*Uniform(free), uniform within the cell.

    With alpha = 0 the prior is never consulted, and the rng consumption is
    identical for every alpha, so planners with and without a prior share a
    sample stream.
    """
    free = grid.free_cell_flat
    if free.size == 0:
        raise EmptyFreeSpaceError("grid has no free cells")
    if rng.random() < alpha:
        flat = p.draw_cell_flat(rng.random())
    else:
        flat = int(free[rng.integers(0, free.size)])
    row, col = divmod(flat, grid.width)
    return Point2(col + rng.random(), row + rng.random())


def sample_mixture(p: ProbabilityMap, grid: OccupancyGrid, cfg: SamplerConfig, rng) -> Point2:
    if p.width != grid.width or p.height != grid.height:
        raise ValueError("probability map does not match grid dimensions")
    return _draw_mixture(p, grid, cfg.alpha, rng)


@dataclass(frozen=True)
class InformedEllipse:
    """Ellipse with foci at start/goal admitting paths no longer than c_best."""

    start: Point2
    goal: Point2
    c_best: float

    def __post_init__(self):
        if self.c_best < self.c_min - 1e-9:
            raise ValueError(f"c_best {self.c_best} below straight-line distance {self.c_min}")

    @property
    def c_min(self) -> float:
        return self.start.dist_to(self.goal)

    @property
    def center(self) -> Point2:
        return Point2((self.start.x + self.goal.x) / 2.0, (self.start.y + self.goal.y) / 2.0)

    @property
    def semi_major(self) -> float:
        return self.c_best / 2.0

    @property
    def semi_minor(self) -> float:
        return math.sqrt(max(self.c_best * self.c_best - self.c_min * self.c_min, 0.0)) / 2.0

    @property
    def rotation(self) -> float:
        """Heading of the start-to-goal axis, radians."""
        return math.atan2(self.goal.y - self.start.y, self.goal.x - self.start.x)


def ellipse_contains(e: InformedEllipse, p: Point2, degenerate_tol: float = 1e-9) -> bool:
    c = e.center
    dx = p.x - c.x
    dy = p.y - c.y
    cos_t = math.cos(e.rotation)
    sin_t = math.sin(e.rotation)
    u = cos_t * dx + sin_t * dy
    v = -sin_t * dx + cos_t * dy
    a = e.semi_major
    b = e.semi_minor
    if b <= degenerate_tol:
        # Degenerate ellipse: the start-goal segment.
        return abs(v) <= degenerate_tol and abs(u) <= a + degenerate_tol
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0


def _ellipse_uniform(e: InformedEllipse, rng) -> Point2:
    """Uniform draw inside the ellipse via the unit-disk transform."""
    r = math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    u = e.semi_major * r * math.cos(theta)
    v = e.semi_minor * r * math.sin(theta)
    cos_t = math.cos(e.rotation)
    sin_t = math.sin(e.rotation)
    c = e.center
    return Point2(c.x + cos_t * u - sin_t * v, c.y + sin_t * u + cos_t * v)


def sample_informed(
    p: ProbabilityMap, e: InformedEllipse, grid: OccupancyGrid, cfg: SamplerConfig, rng
) -> Point2:
    """Draw from the mixture restricted to the informed ellipse.

    Rejection-samples the mixture first; if that keeps missing the ellipse,
    falls back to direct uniform draws inside the ellipse clipped to free
    space. Raises EllipseExhaustedError when both phases fail.
    """
    if p.width != grid.width or p.height != grid.height:
        raise ValueError("probability map does not match grid dimensions")
    for _ in range(cfg.max_rejections):
        pt = _draw_mixture(p, grid, cfg.alpha, rng)
        if ellipse_contains(e, pt):
            return pt
    for _ in range(cfg.max_rejections):
        pt = _ellipse_uniform(e, rng)
        if ellipse_contains(e, pt) and is_free(grid, pt):
            return pt
    raise EllipseExhaustedError("no free in-ellipse sample found")


def _write_npri(path, kind: int, weights: np.ndarray) -> None:
    h, w = weights.shape
    with open(path, "wb") as f:
        f.write(NPRI_MAGIC)
        f.write(struct.pack("<B", kind))
        f.write(struct.pack("<II", w, h))
        f.write(np.ascontiguousarray(weights, dtype="<f4").tobytes())


def _read_npri(path) -> tuple[int, np.ndarray]:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 13:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    if blob[:4] != NPRI_MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}, expected {NPRI_MAGIC!r}")
    kind = blob[4]
    w, h = struct.unpack_from("<II", blob, 5)
    if w < 1 or h < 1:
        raise FormatError(f"{path}: invalid dimensions {w}x{h}")
    expected = 13 + 4 * w * h
    if len(blob) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {w}x{h}, got {len(blob)}")
    data = np.frombuffer(blob, dtype="<f4", count=w * h, offset=13).reshape(h, w)
    return kind, np.asarray(data, dtype=np.float64)


def save_prior(p: ProbabilityMap, path) -> None:
    _write_npri(path, KIND_PRIOR, p.weights)


def load_prior(path, grid: OccupancyGrid) -> ProbabilityMap:
    """Load and re-validate a prior file against its grid.

    Sums within 1e-4 of 1 are renormalized; anything else is rejected.
    """
    kind, data = _read_npri(path)
    if kind != KIND_PRIOR:
        raise FormatError(f"{path}: kind byte 0x{kind:02x} is not a normalized prior")
    if data.shape != (grid.height, grid.width):
        raise FormatError(
            f"{path}: dimensions {data.shape[1]}x{data.shape[0]} do not match "
            f"grid {grid.width}x{grid.height}"
        )
    if not np.isfinite(data).all() or (data < 0).any():
        raise FormatError(f"{path}: weights must be finite and non-negative")
    total = float(data.sum())
    if abs(total - 1.0) > _SUM_TOLERANCE:
        raise FormatError(f"{path}: weights sum to {total}, outside 1 +- {_SUM_TOLERANCE}")
    if data[grid.occupied].any():
        raise FormatError(f"{path}: positive weight on occupied cells")
    return ProbabilityMap(data / total, grid)


def save_mask(mask: PathMask, path) -> None:
    """Write a raw 0/1 label mask in the shared binary format (mask kind)."""
    _write_npri(path, KIND_MASK, mask.cells.astype(np.float64))


def load_mask(path) -> PathMask:
    kind, data = _read_npri(path)
    if kind != KIND_MASK:
        raise FormatError(f"{path}: kind byte 0x{kind:02x} is not a mask")
    if not np.isin(data, (0.0, 1.0)).all():
        raise FormatError(f"{path}: mask values must be 0 or 1")
    return PathMask(data.astype(bool))

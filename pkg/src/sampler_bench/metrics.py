"""Path quality metrics and their mean/std aggregation."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

from .grid_map import Point2


def path_length(path: Sequence[Point2]) -> float:
    """Total Euclidean length; a single point has length 0."""
    if len(path) < 1:
        raise ValueError("path must contain at least one point")
    return sum(a.dist_to(b) for a, b in zip(path, path[1:]))


def smoothness(path: Sequence[Point2]) -> float:
    """Total absolute turning angle in radians; 0 for straight paths.

    Heading changes at interior vertices are wrapped to [0, pi] before
    summing. Consecutive duplicate points carry no heading and are skipped.
    """
    if len(path) < 2:
        raise ValueError("path must contain at least two points")
    headings = []
    for a, b in zip(path, path[1:]):
        if a.x == b.x and a.y == b.y:
            continue
        headings.append(math.atan2(b.y - a.y, b.x - a.x))
    total = 0.0
    for h1, h2 in zip(headings, headings[1:]):
        d = (h2 - h1 + math.pi) % (2.0 * math.pi) - math.pi
        total += abs(d)
    return total


@dataclass(frozen=True)
class RunRecord:
    """One planner execution's metrics."""

    planner: str
    map_id: str
    seed: int
    success: bool
    path_length: Optional[float]
    smoothness: Optional[float]
    wall_time: float

    def __post_init__(self):
        if self.success:
            if self.path_length is None or self.smoothness is None:
                raise ValueError("successful runs must carry path_length and smoothness")
            if not (math.isfinite(self.path_length) and math.isfinite(self.smoothness)):
                raise ValueError("metrics of successful runs must be finite")
        elif self.path_length is not None or self.smoothness is not None:
            raise ValueError("failed runs must not carry path metrics")


@dataclass(frozen=True)
class AggregateRow:
    """Mean +- sample std per metric over a batch of runs.

    Length and smoothness aggregate over successful runs only; time over all
    runs. With no successful run they are NaN.
    """

    runs: int
    success_rate: float
    len_mean: float
    len_std: float
    time_mean: float
    time_std: float
    smooth_mean: float
    smooth_std: float


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return (math.nan, math.nan)
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return (mean, std)


def aggregate(records: Sequence[RunRecord]) -> AggregateRow:
    if not records:
        raise ValueError("cannot aggregate zero records")
    ok = [r for r in records if r.success]
    len_mean, len_std = _mean_std([r.path_length for r in ok])
    smooth_mean, smooth_std = _mean_std([r.smoothness for r in ok])
    time_mean, time_std = _mean_std([r.wall_time for r in records])
    return AggregateRow(
        runs=len(records),
        success_rate=100.0 * len(ok) / len(records),
        len_mean=len_mean,
        len_std=len_std,
        time_mean=time_mean,
        time_std=time_std,
        smooth_mean=smooth_mean,
        smooth_std=smooth_std,
    )

"""Tree-based planners: classic, prior-guided, and prior-guided informed.

All three share one engine: sample, find nearest, steer one step, choose the
cheapest collision-free parent in the rewire radius, then re-parent any
neighbor the new node improves. A solution is a tree node within
goal_tolerance of the goal with a collision-free terminal segment to the
exact goal; the terminal segment counts toward the reported cost.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import EllipseExhaustedError
from .grid_map import OccupancyGrid, PlanningProblem, Point2, is_free, segment_collision_free
from .prior import InformedEllipse, ProbabilityMap, SamplerConfig, _draw_mixture, sample_informed

REWIRE_EPS = 1e-9


@dataclass
class PlannerConfig:
    """Run parameters; defaults follow the benchmark's standard settings."""

    iterations: int = 1000
    step: float = 10.0
    rewire_radius: float = 10.0
    alpha: float = 0.5
    goal_tolerance: float = 10.0
    seed: int = 0
    max_rejections: int = 100
    record_samples: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.step <= 0 or self.rewire_radius <= 0 or self.goal_tolerance <= 0:
            raise ValueError("step, rewire_radius, and goal_tolerance must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


class Tree:
    """Rooted planning tree: positions, parent links, cost-to-come."""

    def __init__(self, root: Point2, capacity: int = 64):
        capacity = max(capacity, 1)
        self._xy = np.empty((capacity, 2))
        self._parent = np.empty(capacity, dtype=np.int64)
        self._cost = np.empty(capacity)
        self._children: list[list[int]] = [[]]
        self._xy[0] = (root.x, root.y)
        self._parent[0] = 0
        self._cost[0] = 0.0
        self._n = 1

    @property
    def size(self) -> int:
        return self._n

    def point(self, i: int) -> Point2:
        return Point2(float(self._xy[i, 0]), float(self._xy[i, 1]))

    def parent(self, i: int) -> int:
        return int(self._parent[i])

    def cost(self, i: int) -> float:
        return float(self._cost[i])

    @property
    def positions(self) -> np.ndarray:
        return self._xy[: self._n]

    @property
    def parents(self) -> np.ndarray:
        return self._parent[: self._n]

    @property
    def costs(self) -> np.ndarray:
        return self._cost[: self._n]

    def _grow(self):
        cap = self._xy.shape[0] * 2
        self._xy = np.resize(self._xy, (cap, 2))
        self._parent = np.resize(self._parent, cap)
        self._cost = np.resize(self._cost, cap)

    def add(self, p: Point2, parent: int, cost: float) -> int:
        if self._n == self._xy.shape[0]:
            self._grow()
        i = self._n
        self._xy[i] = (p.x, p.y)
        self._parent[i] = parent
        self._cost[i] = cost
        self._children.append([])
        self._children[parent].append(i)
        self._n += 1
        return i

    def reparent(self, i: int, new_parent: int, new_cost: float) -> None:
        """Re-attach node i and recompute costs of its whole subtree."""
        self._children[int(self._parent[i])].remove(i)
        self._parent[i] = new_parent
        self._children[new_parent].append(i)
        self._cost[i] = new_cost
        stack = list(self._children[i])
        while stack:
            j = stack.pop()
            pj = int(self._parent[j])
            self._cost[j] = self._cost[pj] + math.hypot(
                self._xy[j, 0] - self._xy[pj, 0], self._xy[j, 1] - self._xy[pj, 1]
            )
            stack.extend(self._children[j])

    @classmethod
    def from_arrays(cls, nodes, parent, cost) -> "Tree":
        nodes = np.asarray(nodes, dtype=float).reshape(-1, 2)
        parent = np.asarray(parent, dtype=np.int64)
        cost = np.asarray(cost, dtype=float)
        if not (len(nodes) == len(parent) == len(cost)) or len(nodes) == 0:
            raise ValueError("nodes, parent, and cost must be equal-length and non-empty")
        tree = cls(Point2(float(nodes[0, 0]), float(nodes[0, 1])), capacity=len(nodes))
        tree._xy[: len(nodes)] = nodes
        tree._parent[: len(nodes)] = parent
        tree._cost[: len(nodes)] = cost
        tree._children = [[] for _ in range(len(nodes))]
        for i in range(1, len(nodes)):
            tree._children[int(parent[i])].append(i)
        tree._n = len(nodes)
        return tree

    def path_to(self, i: int) -> list[Point2]:
        chain = [i]
        while chain[-1] != 0:
            chain.append(int(self._parent[chain[-1]]))
        return [self.point(j) for j in reversed(chain)]

    def validate(self, grid: OccupancyGrid | None = None, tol: float = 1e-9) -> None:
        """Assert structural invariants; used by tests and debug runs."""
        n = self._n
        if self._parent[0] != 0 or self._cost[0] != 0.0:
            raise AssertionError("root must be its own parent with cost 0")
        # Acyclicity: every node reachable from the root via children links.
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            j = stack.pop()
            for ch in self._children[j]:
                if seen[ch]:
                    raise AssertionError(f"node {ch} reached twice; cycle or duplicate link")
                seen[ch] = True
                stack.append(ch)
        if not seen.all():
            raise AssertionError("tree contains nodes unreachable from the root (cycle)")
        # Cost consistency, vectorized.
        if n > 1:
            idx = np.arange(1, n)
            par = self._parent[idx]
            seg = np.hypot(
                self._xy[idx, 0] - self._xy[par, 0], self._xy[idx, 1] - self._xy[par, 1]
            )
            err = np.abs(self._cost[idx] - (self._cost[par] + seg))
            if err.max() > tol:
                raise AssertionError(f"cost inconsistency up to {err.max():.3e}")
        if grid is not None:
            for i in range(1, n):
                if not segment_collision_free(grid, self.point(i), self.point(self.parent(i))):
                    raise AssertionError(f"edge {self.parent(i)}->{i} collides")


def nearest(tree: Tree, q: Point2) -> int:
    """Index of the node closest to q; ties go to the lowest index."""
    if tree.size == 0:
        raise ValueError("tree is empty")
    xy = tree.positions
    d2 = (xy[:, 0] - q.x) ** 2 + (xy[:, 1] - q.y) ** 2
    return int(np.argmin(d2))


def steer(src: Point2, dst: Point2, step: float) -> Point2:
    """Move from src toward dst, at most one step length."""
    if step <= 0:
        raise ValueError("step must be positive")
    d = src.dist_to(dst)
    if d <= step:
        return dst
    return Point2(src.x + step * (dst.x - src.x) / d, src.y + step * (dst.y - src.y) / d)


def _extend_impl(
    tree: Tree,
    x_new: Point2,
    grid: OccupancyGrid,
    rewire_radius: float,
    nearest_index: Optional[int],
) -> tuple[Optional[int], tuple[int, ...]]:
    if not is_free(grid, x_new):
        return None, ()
    n = tree.size
    xy = tree.positions
    dx = xy[:, 0] - x_new.x
    dy = xy[:, 1] - x_new.y
    d2 = dx * dx + dy * dy
    near = np.nonzero(d2 <= rewire_radius * rewire_radius)[0]
    dists = np.sqrt(d2[near])
    scores = tree.costs[near] + dists

    parent = -1
    parent_dist = 0.0
    for k in np.argsort(scores, kind="stable"):
        i = int(near[k])
        if segment_collision_free(grid, tree.point(i), x_new):
            parent = i
            parent_dist = float(dists[k])
            break
    if parent == -1:
        fb = nearest_index if nearest_index is not None else nearest(tree, x_new)
        if d2[fb] > rewire_radius * rewire_radius and segment_collision_free(
            grid, tree.point(fb), x_new
        ):
            parent = fb
            parent_dist = math.sqrt(float(d2[fb]))
    if parent == -1:
        return None, ()

    new_idx = tree.add(x_new, parent, tree.cost(parent) + parent_dist)
    rewired = []
    for k in range(near.size):
        i = int(near[k])
        if i == parent:
            continue
        cand = tree.cost(new_idx) + float(dists[k])
        if cand < tree.cost(i) - REWIRE_EPS and segment_collision_free(grid, tree.point(i), x_new):
            tree.reparent(i, new_idx, cand)
            rewired.append(i)
    return new_idx, tuple(rewired)


def extend_and_rewire(
    tree: Tree,
    x_new: Point2,
    grid: OccupancyGrid,
    rewire_radius: float,
    nearest_index: Optional[int] = None,
) -> Optional[int]:
    """Insert x_new with the cheapest collision-free parent, then rewire.

    Returns the new node index, or None when no collision-free connection
    exists (the iteration is skipped).
    """
    idx, _ = _extend_impl(tree, x_new, grid, rewire_radius, nearest_index)
    return idx


@dataclass(frozen=True)
class IterationEvent:
    """Per-iteration trace record handed to an observer callback.

    `tree` is the planner's live tree; observers must treat it read-only.
    """

    iteration: int
    sample: Optional[Point2]
    c_best_before: float
    new_index: Optional[int]
    rewired: tuple[int, ...]
    c_best_after: float
    tree: "Tree"


@dataclass
class PlanOutcome:
    success: bool
    path: list[Point2]
    cost: float
    iterations_used: int
    wall_time: float
    tree: Tree
    sample_trace: Optional[list[Point2]] = None


SampleFn = Callable[[np.random.Generator, float], Optional[Point2]]
Observer = Callable[[IterationEvent], None]


def _plan(
    problem: PlanningProblem,
    config: PlannerConfig,
    draw: SampleFn,
    observer: Optional[Observer],
) -> PlanOutcome:
    grid = problem.grid
    goal = problem.goal
    rng = np.random.default_rng(config.seed % (1 << 64))
    tree = Tree(problem.start, capacity=config.iterations + 1)
    trace: Optional[list[Point2]] = [] if config.record_samples else None

    goal_links: dict[int, float] = {}
    d0 = problem.start.dist_to(goal)
    if d0 <= config.goal_tolerance and segment_collision_free(grid, problem.start, goal):
        goal_links[0] = d0
    c_best = _best_cost(tree, goal_links)

    t0 = time.perf_counter()
    for it in range(config.iterations):
        c_before = c_best
        sample = draw(rng, c_best)
        new_idx: Optional[int] = None
        rewired: tuple[int, ...] = ()
        if sample is not None:
            if trace is not None:
                trace.append(sample)
            ni = nearest(tree, sample)
            x_new = steer(tree.point(ni), sample, config.step)
            if segment_collision_free(grid, tree.point(ni), x_new):
                new_idx, rewired = _extend_impl(tree, x_new, grid, config.rewire_radius, ni)
                if new_idx is not None:
                    d = x_new.dist_to(goal)
                    if d <= config.goal_tolerance and segment_collision_free(grid, x_new, goal):
                        goal_links[new_idx] = d
        c_best = _best_cost(tree, goal_links)
        if observer is not None:
            observer(IterationEvent(it, sample, c_before, new_idx, rewired, c_best, tree))
    elapsed = time.perf_counter() - t0

    best_idx = _best_index(tree, goal_links)
    if best_idx is None:
        return PlanOutcome(False, [], math.inf, config.iterations, elapsed, tree, trace)
    path = tree.path_to(best_idx) + [goal]
    return PlanOutcome(True, path, c_best, config.iterations, elapsed, tree, trace)


def _best_cost(tree: Tree, goal_links: dict[int, float]) -> float:
    if not goal_links:
        return math.inf
    return min(tree.cost(i) + d for i, d in goal_links.items())


def _best_index(tree: Tree, goal_links: dict[int, float]) -> Optional[int]:
    best = math.inf
    best_i = None
    for i in sorted(goal_links):
        c = tree.cost(i) + goal_links[i]
        if c < best:
            best = c
            best_i = i
    return best_i


def _check_paired(prior: ProbabilityMap, grid: OccupancyGrid) -> None:
    if prior.width != grid.width or prior.height != grid.height:
        raise ValueError("prior dimensions do not match the problem's grid")


OUTCOME_FORMAT = "planoutcome/1"


def outcome_to_dict(outcome: PlanOutcome) -> dict:
    return {
        "format": OUTCOME_FORMAT,
        "success": outcome.success,
        "cost": outcome.cost,
        "iterations_used": outcome.iterations_used,
        "wall_time": outcome.wall_time,
        "path": [[p.x, p.y] for p in outcome.path],
        "tree": {
            "nodes": outcome.tree.positions.tolist(),
            "parent": outcome.tree.parents.tolist(),
            "cost": outcome.tree.costs.tolist(),
        },
        "sample_trace": None
        if outcome.sample_trace is None
        else [[p.x, p.y] for p in outcome.sample_trace],
    }


def outcome_from_dict(doc: dict) -> PlanOutcome:
    from .errors import FormatError

    if doc.get("format") != OUTCOME_FORMAT:
        raise FormatError(f"unknown outcome format {doc.get('format')!r}")
    tdoc = doc["tree"]
    tree = Tree.from_arrays(tdoc["nodes"], tdoc["parent"], tdoc["cost"])
    trace = doc.get("sample_trace")
    return PlanOutcome(
        success=bool(doc["success"]),
        path=[Point2(x, y) for x, y in doc["path"]],
        cost=float(doc["cost"]),
        iterations_used=int(doc["iterations_used"]),
        wall_time=float(doc["wall_time"]),
        tree=tree,
        sample_trace=None if trace is None else [Point2(x, y) for x, y in trace],
    )


def save_outcome(outcome: PlanOutcome, path) -> None:
    import json

    with open(path, "w", encoding="ascii") as f:
        json.dump(outcome_to_dict(outcome), f, separators=(",", ":"))
        f.write("\n")


def load_outcome(path) -> PlanOutcome:
    import json

    from .errors import FormatError

    with open(path, "r", encoding="ascii") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    return outcome_from_dict(doc)


def plan_rrt_star(
    problem: PlanningProblem, config: PlannerConfig, observer: Optional[Observer] = None
) -> PlanOutcome:
    """Baseline planner with uniform free-space sampling."""

    def draw(rng, _c_best):
        return _draw_mixture(None, problem.grid, 0.0, rng)

    return _plan(problem, config, draw, observer)


def plan_neural_rrt_star(
    problem: PlanningProblem,
    config: PlannerConfig,
    prior: ProbabilityMap,
    observer: Optional[Observer] = None,
) -> PlanOutcome:
    """Prior-guided planner: mixture sampling replaces uniform sampling."""
    _check_paired(prior, problem.grid)

    def draw(rng, _c_best):
        return _draw_mixture(prior, problem.grid, config.alpha, rng)

    return _plan(problem, config, draw, observer)


def plan_neural_informed(
    problem: PlanningProblem,
    config: PlannerConfig,
    prior: ProbabilityMap,
    observer: Optional[Observer] = None,
) -> PlanOutcome:
    """Prior-guided planner that restricts post-solution samples to the
    informed ellipse of the current best cost."""
    _check_paired(prior, problem.grid)
    scfg = SamplerConfig(alpha=config.alpha, max_rejections=config.max_rejections)

    def draw(rng, c_best):
        if math.isinf(c_best):
            return _draw_mixture(prior, problem.grid, config.alpha, rng)
        ellipse = InformedEllipse(problem.start, problem.goal, c_best)
        try:
            return sample_informed(prior, ellipse, problem.grid, scfg, rng)
        except EllipseExhaustedError:
            return None

    return _plan(problem, config, draw, observer)

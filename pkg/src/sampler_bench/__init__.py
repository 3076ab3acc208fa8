"""Tree planners with sampling priors on 2D occupancy grids, benchmarked."""

from .bench import (
    ALL_PLANNERS,
    ExperimentSpec,
    ResultTable,
    derive_seed,
    export_results,
    load_results,
    run_experiment,
    summarize_improvements,
)
from .dataset import generate_dataset
from .errors import (
    ConfigurationError,
    EllipseExhaustedError,
    EmptyFreeSpaceError,
    EmptyPriorError,
    FormatError,
    InfeasibleProblemError,
    SamplerBenchError,
)
from .grid_map import (
    Density,
    OccupancyGrid,
    PlanningProblem,
    Point2,
    generate_map,
    is_free,
    load_map,
    sample_problem,
    save_map,
    segment_collision_free,
)
from .metrics import AggregateRow, RunRecord, aggregate, path_length, smoothness
from .planner import (
    IterationEvent,
    PlannerConfig,
    PlanOutcome,
    Tree,
    extend_and_rewire,
    load_outcome,
    nearest,
    plan_neural_informed,
    plan_neural_rrt_star,
    plan_rrt_star,
    save_outcome,
    steer,
)
from .prior import (
    InformedEllipse,
    ProbabilityMap,
    SamplerConfig,
    ellipse_contains,
    load_mask,
    load_prior,
    normalize,
    oracle_prior,
    sample_informed,
    sample_mixture,
    save_mask,
    save_prior,
)
from .render import SceneSpec, render_scene, render_svg
from .search import CellPath, PathMask, astar, cell_path_cost, dijkstra_oracle, dilate_mask

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

"""Command-line entry point for map generation, planning, and benchmarks."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    ALL_PLANNERS,
    PLANNER_RRT,
    ExperimentSpec,
    derive_seed,
    export_results,
    format_improvements,
    run_experiment,
    summarize_improvements,
)
from .dataset import generate_dataset
from .errors import EmptyPriorError, FormatError, SamplerBenchError
from .grid_map import Density, PlanningProblem, Point2, generate_map, load_map, save_map
from .metrics import path_length, smoothness
from .planner import (
    PlannerConfig,
    plan_neural_informed,
    plan_neural_rrt_star,
    plan_rrt_star,
    save_outcome,
)
from .prior import InformedEllipse, load_prior, oracle_prior
from .render import SceneSpec, render_scene


def _parse_point(text: str) -> Point2:
    try:
        x, y = (float(v) for v in text.split(","))
    except Exception:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return Point2(x, y)


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            side = int(parts[0])
            return side, side
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise ValueError(f"expected 'N' or 'WxH', got {text!r}")


def cmd_gen_maps(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    width, height = _parse_size(args.size)
    density = Density(args.density)
    for i in range(args.count):
        grid = generate_map(derive_seed(args.seed, density.value, i), density, width, height)
        path = out / f"{density.value}-{i:03d}.json"
        save_map(grid, path)
        print(path)
    return 0


def cmd_plan(args) -> int:
    grid = load_map(args.map)
    problem = PlanningProblem(grid, _parse_point(args.start), _parse_point(args.goal))
    config = PlannerConfig(
        iterations=args.iterations,
        step=args.step,
        rewire_radius=args.radius,
        alpha=args.alpha,
        goal_tolerance=args.step,
        seed=args.seed,
    )
    prior = None
    if args.planner in ("neural", "neural-informed"):
        if args.prior is None:
            raise ValueError(f"--planner {args.planner} requires --prior (oracle or a file)")
        prior = oracle_prior(problem) if args.prior == "oracle" else load_prior(args.prior, grid)

    if args.planner == "rrtstar":
        outcome = plan_rrt_star(problem, config)
    elif args.planner == "neural":
        outcome = plan_neural_rrt_star(problem, config, prior)
    else:
        outcome = plan_neural_informed(problem, config, prior)

    if outcome.success:
        print(
            f"planner={args.planner} success=true "
            f"length={path_length(outcome.path):.2f} "
            f"smoothness={smoothness(outcome.path):.2f} "
            f"time={outcome.wall_time:.2f}s"
        )
    else:
        print(f"planner={args.planner} success=false time={outcome.wall_time:.2f}s")

    if args.json:
        save_outcome(outcome, args.json)
    if args.svg:
        ellipse = None
        if args.planner == "neural-informed" and outcome.success:
            ellipse = InformedEllipse(problem.start, problem.goal, outcome.cost)
        scene = SceneSpec(
            grid=grid,
            tree=outcome.tree,
            path=outcome.path if outcome.success else None,
            prior=prior,
            ellipse=ellipse,
        )
        render_scene(scene, args.svg)
    return 0


def cmd_bench(args) -> int:
    if args.config is not None:
        if not Path(args.config).is_file():
            print(f"error: config file not found: {args.config}", file=sys.stderr)
            return 2
        spec = ExperimentSpec.from_json(args.config)
    else:
        spec = ExperimentSpec()
    table = run_experiment(spec)
    if args.out_csv:
        export_results(table, "csv", args.out_csv)
    if args.out_json:
        export_results(table, "json", args.out_json)
    try:
        print(format_improvements(summarize_improvements(table)))
    except ValueError:
        print("(improvement summary needs the baseline and a prior-guided planner)")
    return 0


def cmd_gen_dataset(args) -> int:
    densities = [Density(d) for d in args.densities.split(",")]
    manifest = generate_dataset(args.seed, args.count, densities, args.out)
    print(f"{len(manifest['samples'])} samples -> {Path(args.out) / 'manifest.json'}")
    return 0


def cmd_validate_prior(args) -> int:
    try:
        grid = load_map(args.map)
        load_prior(args.prior, grid)
    except (FormatError, EmptyPriorError, OSError, ValueError) as e:
        print(f"invalid prior: {e}", file=sys.stderr)
        return 1
    print(f"{args.prior}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sampler-bench",
        description="Tree planners with sampling priors on occupancy grids, plus benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-maps", help="generate obstacle maps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", required=True, choices=[d.value for d in Density])
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--size", default="224", help="N or WxH, in cells")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_maps)

    p = sub.add_parser("plan", help="plan a single problem")
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True, help="x,y in cells")
    p.add_argument("--goal", required=True, help="x,y in cells")
    p.add_argument("--planner", default="rrtstar", choices=list(ALL_PLANNERS))
    p.add_argument("--prior", default=None, help="'oracle' or an NPRI file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--step", type=float, default=10.0)
    p.add_argument("--radius", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--svg", default=None, help="write an SVG scene")
    p.add_argument("--json", default=None, help="write the outcome as JSON")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run the benchmark protocol")
    p.add_argument("--config", default=None, help="experiment spec JSON")
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-dataset", help="emit a training corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--densities", default="sparse,medium,dense")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("validate-prior", help="check a prior file against a map")
    p.add_argument("--prior", required=True)
    p.add_argument("--map", required=True)
    p.set_defaults(func=cmd_validate_prior)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SamplerBenchError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

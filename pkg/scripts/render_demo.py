#!/usr/bin/env python3
"""Render side-by-side SVG scenes of the three planners on one map."""

import argparse
from pathlib import Path

from sampler_bench import (
    Density,
    InformedEllipse,
    PlannerConfig,
    SceneSpec,
    generate_map,
    oracle_prior,
    plan_neural_informed,
    plan_neural_rrt_star,
    plan_rrt_star,
    render_scene,
    sample_problem,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--density", default="medium", choices=[d.value for d in Density])
    ap.add_argument("--out", default="scenes")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = generate_map(args.seed, Density(args.density), 160, 160)
    problem = sample_problem(grid, args.seed, min_separation=100.0)
    prior = oracle_prior(problem)
    cfg = PlannerConfig(seed=args.seed)

    outcomes = {
        "rrtstar": plan_rrt_star(problem, cfg),
        "neural": plan_neural_rrt_star(problem, cfg, prior),
        "neural-informed": plan_neural_informed(problem, cfg, prior),
    }
    for name, outcome in outcomes.items():
        ellipse = None
        show_prior = name != "rrtstar"
        if name == "neural-informed" and outcome.success:
            ellipse = InformedEllipse(problem.start, problem.goal, outcome.cost)
        scene = SceneSpec(
            grid=grid,
            tree=outcome.tree,
            path=outcome.path if outcome.success else None,
            prior=prior if show_prior else None,
            ellipse=ellipse,
        )
        path = out / f"{args.density}-{args.seed}-{name}.svg"
        render_scene(scene, path)
        state = f"cost {outcome.cost:.1f}" if outcome.success else "failed"
        print(f"{path} ({state})")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""End-to-end trainer integration: dataset -> train -> export -> plan.

Builds a 50-sample toy dataset, trains the TypeScript prior model for 10
epochs, exports priors for 5 held-out maps, checks them with validate-prior,
and compares prior-guided planning against the uniform baseline. Prints one
PASS/FAIL line per criterion; exits non-zero on failure.
"""

import argparse
import json
import statistics
import subprocess
import sys
import time
from pathlib import Path

from sampler_bench import (
    Density,
    PlannerConfig,
    derive_seed,
    generate_dataset,
    generate_map,
    load_prior,
    plan_neural_rrt_star,
    plan_rrt_star,
    sample_problem,
    save_map,
)

ROOT = Path(__file__).resolve().parent.parent
TRAINER = ROOT / "trainer"

MAP_SIZE = 160
DENSITIES = list(Density)


def run(cmd, **kw):
    print("+", " ".join(str(c) for c in cmd))
    return subprocess.run([str(c) for c in cmd], check=True, **kw)


def report(name, ok, detail=""):
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}" + (f" ({detail})" if detail else ""))
    return ok


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--work", default="/tmp/trainer-integration")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--count", type=int, default=50)
    args = ap.parse_args()

    t0 = time.perf_counter()
    work = Path(args.work)
    work.mkdir(parents=True, exist_ok=True)
    ds_dir = work / "dataset"
    eval_dir = work / "eval"
    model_dir = work / "model"
    prior_dir = work / "priors"

    print(f"== generating {args.count}-sample toy dataset ==")
    generate_dataset(
        args.seed, args.count, DENSITIES, ds_dir,
        width=MAP_SIZE, height=MAP_SIZE, min_separation=100.0,
    )

    print("== generating 5 held-out evaluation maps ==")
    (eval_dir / "maps").mkdir(parents=True, exist_ok=True)
    eval_cases = []
    eval_samples = []
    for i in range(5):
        density = DENSITIES[i % len(DENSITIES)]
        map_seed = derive_seed(args.seed, "heldout", i)
        grid = generate_map(map_seed, density, MAP_SIZE, MAP_SIZE)
        problem = sample_problem(grid, derive_seed(map_seed, "problem"), 100.0)
        rel = f"maps/eval-{i}.json"
        save_map(grid, eval_dir / rel)
        eval_cases.append((grid, problem))
        eval_samples.append(
            {
                "map": rel,
                "start": list(problem.start.cell()),
                "goal": list(problem.goal.cell()),
                "density": density.value,
            }
        )
    (eval_dir / "manifest.json").write_text(
        json.dumps({"format": "dataset/1", "samples": eval_samples})
    )

    print("== building trainer ==")
    run(["npx", "tsc"], cwd=TRAINER)

    print(f"== training ({args.epochs} epochs) ==")
    run(
        ["node", "dist/main.js", "train",
         "--manifest", ds_dir / "manifest.json", "--out", model_dir,
         "--epochs", args.epochs, "--lr", "1e-3", "--seed", args.seed],
        cwd=TRAINER,
    )

    print("== exporting priors for held-out maps ==")
    run(
        ["node", "dist/main.js", "export",
         "--model", model_dir, "--manifest", eval_dir / "manifest.json", "--out", prior_dir],
        cwd=TRAINER,
    )

    print("== exporting priors for training maps (IoU check) ==")
    train_prior_dir = work / "train-priors"
    head_manifest = work / "train-head-manifest.json"
    full = json.loads((ds_dir / "manifest.json").read_text())
    head_manifest.write_text(
        json.dumps({"format": "dataset/1", "samples": full["samples"][:5]})
    )
    out = run(
        ["node", "dist/main.js", "export",
         "--model", model_dir, "--manifest", head_manifest, "--out", train_prior_dir],
        cwd=TRAINER, capture_output=True, text=True,
    )
    print(out.stdout, end="")
    ious = [float(line.rsplit("iou=", 1)[1]) for line in out.stdout.splitlines() if "iou=" in line]
    ok_iou = report(
        "Training-map IoU",
        ious and statistics.fmean(ious) >= 0.3,
        f"mean IoU {statistics.fmean(ious):.3f} over {len(ious)} training maps",
    )

    print("== validate-prior on every exported held-out prior ==")
    all_valid = True
    for i in range(5):
        proc = subprocess.run(
            [sys.executable, "-m", "sampler_bench.cli", "validate-prior",
             "--prior", str(prior_dir / f"eval-{i}.npri"),
             "--map", str(eval_dir / f"maps/eval-{i}.json")],
        )
        all_valid &= proc.returncode == 0
    ok_valid = report("Exported priors validate", all_valid, "5/5 exit 0" if all_valid else "")

    print("== planner comparison on held-out maps (10 seeds each) ==")
    wins = 0
    for i, (grid, problem) in enumerate(eval_cases):
        prior = load_prior(prior_dir / f"eval-{i}.npri", grid)
        base, guided = [], []
        for s in range(10):
            cfg = PlannerConfig(seed=derive_seed(args.seed, "cmp", i, s))
            o_base = plan_rrt_star(problem, cfg)
            o_guided = plan_neural_rrt_star(problem, cfg, prior)
            if o_base.success:
                base.append(o_base.cost)
            if o_guided.success:
                guided.append(o_guided.cost)
        mb = statistics.fmean(base) if base else float("inf")
        mg = statistics.fmean(guided) if guided else float("inf")
        win = mg <= mb
        wins += win
        print(
            f"  eval-{i} ({eval_samples[i]['density']}): baseline {mb:.2f} "
            f"({len(base)}/10 ok) vs guided {mg:.2f} ({len(guided)}/10 ok) -> "
            f"{'guided' if win else 'baseline'}"
        )
    ok_plan = report("Trained prior shortens paths", wins >= 3, f"guided wins {wins}/5 maps")

    elapsed = time.perf_counter() - t0
    ok_time = report("Integration runtime", elapsed < 900.0, f"{elapsed:.0f}s < 900s")

    sys.exit(0 if (ok_iou and ok_valid and ok_plan and ok_time) else 1)


if __name__ == "__main__":
    main()

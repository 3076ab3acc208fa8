#!/usr/bin/env python3
"""Run the full benchmark protocol and write results under results/.

Defaults: 3 densities x 5 maps x 10 runs x 3 planners, oracle prior,
1000 iterations, step 10, rewire radius 10, alpha 0.5.
"""

import argparse
import time
from pathlib import Path

from sampler_bench import ExperimentSpec, export_results, run_experiment, summarize_improvements
from sampler_bench.bench import format_improvements


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--master-seed", type=int, default=2026)
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int, default=None, help="overrides SAMPLER_BENCH_THREADS")
    ap.add_argument("--prior-source", default="oracle", help="'oracle' or a directory of NPRI files")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = ExperimentSpec(master_seed=args.master_seed, prior_source=args.prior_source)
    t0 = time.perf_counter()
    table = run_experiment(spec, workers=args.workers)
    print(f"protocol finished in {time.perf_counter() - t0:.1f}s")
    export_results(table, "csv", out / "results.csv")
    export_results(table, "json", out / "results.json")
    print(f"wrote {out / 'results.csv'} and {out / 'results.json'}")
    print(format_improvements(summarize_improvements(table)))


if __name__ == "__main__":
    main()

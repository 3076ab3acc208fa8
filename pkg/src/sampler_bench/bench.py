"""Benchmark harness: seeded map suites, planner runs, tables, exports.

Protocol: per density, generate `maps_per_density` maps, one start/goal pair
each, and execute every planner `runs_per_map` times. Seeds derive from a
stable hash chain so any single run is reproducible in isolation.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError, FormatError
from .grid_map import Density, OccupancyGrid, PlanningProblem, generate_map, sample_problem
from .metrics import AggregateRow, RunRecord, aggregate, path_length, smoothness
from .planner import PlannerConfig, plan_neural_informed, plan_neural_rrt_star, plan_rrt_star
from .prior import ProbabilityMap, load_prior, oracle_prior

RESULTS_FORMAT = "benchresults/1"
THREADS_ENV = "SAMPLER_BENCH_THREADS"

PLANNER_RRT = "rrtstar"
PLANNER_NEURAL = "neural"
PLANNER_INFORMED = "neural-informed"
ALL_PLANNERS = (PLANNER_RRT, PLANNER_NEURAL, PLANNER_INFORMED)

CSV_HEADER = (
    "density,map,planner,runs,success_rate,len_mean,len_std,"
    "time_mean,time_std,smooth_mean,smooth_std"
)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from a chain of values."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass
class ExperimentSpec:
    densities: tuple[Density, ...] = (Density.SPARSE, Density.MEDIUM, Density.DENSE)
    maps_per_density: int = 5
    runs_per_map: int = 10
    planners: tuple[str, ...] = ALL_PLANNERS
    planner_config: PlannerConfig = field(default_factory=PlannerConfig)
    master_seed: int = 2026
    prior_source: str = "oracle"  # "oracle" or a directory of NPRI files
    # 160 keeps 1000-iteration uniform sampling reliable at tolerance 10;
    # at 224 the per-run miss probability of the goal disk is ~1%.
    map_width: int = 160
    map_height: int = 160
    min_separation: float = 100.0

    def __post_init__(self):
        if self.maps_per_density < 1 or self.runs_per_map < 1:
            raise ValueError("maps_per_density and runs_per_map must be >= 1")
        if not self.planners:
            raise ValueError("planner list must be non-empty")
        unknown = set(self.planners) - set(ALL_PLANNERS)
        if unknown:
            raise ValueError(f"unknown planners: {sorted(unknown)}")
        self.densities = tuple(Density(d) for d in self.densities)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path, "r", encoding="utf-8") as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as e:
                raise FormatError(
                    f"{path}: invalid JSON at line {e.lineno}, column {e.colno}"
                ) from e
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        planner_keys = {
            "iterations", "step", "rewire_radius", "alpha",
            "goal_tolerance", "max_rejections",
        }
        cfg = PlannerConfig(**{k: doc[k] for k in planner_keys if k in doc})
        spec_keys = {
            "densities", "maps_per_density", "runs_per_map", "planners",
            "master_seed", "prior_source", "map_width", "map_height",
            "min_separation",
        }
        kwargs = {k: doc[k] for k in spec_keys if k in doc}
        if "densities" in kwargs:
            kwargs["densities"] = tuple(Density(d) for d in kwargs["densities"])
        if "planners" in kwargs:
            kwargs["planners"] = tuple(kwargs["planners"])
        return cls(planner_config=cfg, **kwargs)

    def to_dict(self) -> dict:
        cfg = self.planner_config
        return {
            "densities": [d.value for d in self.densities],
            "maps_per_density": self.maps_per_density,
            "runs_per_map": self.runs_per_map,
            "planners": list(self.planners),
            "master_seed": self.master_seed,
            "prior_source": self.prior_source,
            "map_width": self.map_width,
            "map_height": self.map_height,
            "min_separation": self.min_separation,
            "iterations": cfg.iterations,
            "step": cfg.step,
            "rewire_radius": cfg.rewire_radius,
            "alpha": cfg.alpha,
            "goal_tolerance": cfg.goal_tolerance,
            "max_rejections": cfg.max_rejections,
        }


@dataclass
class MapSummary:
    density: Density
    map_index: int  # 1-based
    seed: int
    start: tuple[float, float]
    goal: tuple[float, float]
    prior_seconds: float

    @property
    def map_id(self) -> str:
        return f"{self.density.value}-{self.map_index}"


@dataclass
class ResultTable:
    spec_doc: dict
    maps: list[MapSummary]
    rows: dict[tuple[str, int, str], AggregateRow]  # (density, map_index, planner)
    records: list[RunRecord]


_PLAN_FNS = {
    PLANNER_RRT: lambda problem, cfg, prior: plan_rrt_star(problem, cfg),
    PLANNER_NEURAL: plan_neural_rrt_star,
    PLANNER_INFORMED: plan_neural_informed,
}


def _prior_path(source_dir: str, density: Density, map_index: int) -> Path:
    return Path(source_dir) / f"{density.value}-{map_index}.npri"


def _build_map_case(
    spec: ExperimentSpec, density: Density, map_index: int
) -> tuple[OccupancyGrid, PlanningProblem, Optional[ProbabilityMap], float, int]:
    map_seed = derive_seed(spec.master_seed, density.value, map_index - 1)
    grid = generate_map(map_seed, density, spec.map_width, spec.map_height)
    problem = sample_problem(grid, derive_seed(map_seed, "problem"), spec.min_separation)
    needs_prior = any(p != PLANNER_RRT for p in spec.planners)
    prior = None
    prior_seconds = 0.0
    if needs_prior:
        t0 = time.perf_counter()
        if spec.prior_source == "oracle":
            prior = oracle_prior(problem)
        else:
            prior = load_prior(_prior_path(spec.prior_source, density, map_index), grid)
        prior_seconds = time.perf_counter() - t0
    return grid, problem, prior, prior_seconds, map_seed


def _run_one_map(args: tuple[dict, str, int]) -> tuple[MapSummary, list[RunRecord]]:
    spec_doc, density_name, map_index = args
    spec = ExperimentSpec.from_dict(spec_doc)
    density = Density(density_name)
    grid, problem, prior, prior_seconds, map_seed = _build_map_case(spec, density, map_index)
    summary = MapSummary(
        density=density,
        map_index=map_index,
        seed=map_seed,
        start=(problem.start.x, problem.start.y),
        goal=(problem.goal.x, problem.goal.y),
        prior_seconds=prior_seconds,
    )
    records: list[RunRecord] = []
    for planner in spec.planners:
        for run_index in range(spec.runs_per_map):
            run_seed = derive_seed(map_seed, planner, run_index)
            cfg = replace(spec.planner_config, seed=run_seed)
            outcome = _PLAN_FNS[planner](problem, cfg, prior)
            records.append(
                RunRecord(
                    planner=planner,
                    map_id=summary.map_id,
                    seed=run_seed,
                    success=outcome.success,
                    path_length=path_length(outcome.path) if outcome.success else None,
                    smoothness=smoothness(outcome.path) if outcome.success else None,
                    wall_time=outcome.wall_time,
                )
            )
    return summary, records


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {env!r}")
    return 1


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> ResultTable:
    """Execute the full protocol and aggregate results.

    Deterministic for a given spec (wall-time fields excepted). Map cases are
    independent units, optionally executed in parallel worker processes.
    """
    if spec.prior_source != "oracle" and any(p != PLANNER_RRT for p in spec.planners):
        missing = []
        for density in spec.densities:
            for m in range(1, spec.maps_per_density + 1):
                p = _prior_path(spec.prior_source, density, m)
                if not p.exists():
                    missing.append(f"{density.value}-{m} ({p})")
        if missing:
            raise ConfigurationError("missing prior files for maps: " + ", ".join(missing))

    tasks = [
        (spec.to_dict(), density.value, m)
        for density in spec.densities
        for m in range(1, spec.maps_per_density + 1)
    ]
    nworkers = _worker_count(workers)
    if nworkers > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            outputs = list(pool.map(_run_one_map, tasks))
    else:
        outputs = [_run_one_map(t) for t in tasks]

    maps: list[MapSummary] = []
    records: list[RunRecord] = []
    rows: dict[tuple[str, int, str], AggregateRow] = {}
    by_key: dict[tuple[str, int, str], list[RunRecord]] = {}
    for (summary, recs), task in zip(outputs, tasks):
        maps.append(summary)
        records.extend(recs)
        for rec in recs:
            by_key.setdefault((summary.density.value, summary.map_index, rec.planner), []).append(rec)
    for key, recs in by_key.items():
        rows[key] = aggregate(recs)
    return ResultTable(spec_doc=spec.to_dict(), maps=maps, rows=rows, records=records)


def _row_order(table: ResultTable) -> list[tuple[str, int, str]]:
    densities = table.spec_doc["densities"]
    planners = table.spec_doc["planners"]
    keys = sorted(
        table.rows.keys(),
        key=lambda k: (densities.index(k[0]), k[1], planners.index(k[2])),
    )
    return keys


def export_results(table: ResultTable, format: str, path) -> None:
    """Write the table as CSV (aggregates only) or JSON (full contents)."""
    if format == "csv":
        _export_csv(table, path)
    elif format == "json":
        _export_json(table, path)
    else:
        raise ValueError(f"unknown export format {format!r}")


def _export_csv(table: ResultTable, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER.split(","))
        for density, map_index, planner in _row_order(table):
            row = table.rows[(density, map_index, planner)]
            w.writerow(
                [
                    density,
                    map_index,
                    planner,
                    row.runs,
                    f"{row.success_rate:.2f}",
                    f"{row.len_mean:.2f}",
                    f"{row.len_std:.2f}",
                    f"{row.time_mean:.2f}",
                    f"{row.time_std:.2f}",
                    f"{row.smooth_mean:.2f}",
                    f"{row.smooth_std:.2f}",
                ]
            )


def _row_doc(row: AggregateRow, key: tuple[str, int, str], prior_by_map: dict) -> dict:
    density, map_index, planner = key
    prior_s = prior_by_map[f"{density}-{map_index}"] if planner != PLANNER_RRT else 0.0
    return {
        "density": density,
        "map": map_index,
        "planner": planner,
        "runs": row.runs,
        "success_rate": row.success_rate,
        "len_mean": row.len_mean,
        "len_std": row.len_std,
        "time_mean": row.time_mean,
        "time_std": row.time_std,
        "smooth_mean": row.smooth_mean,
        "smooth_std": row.smooth_std,
        "time_with_prior_mean": row.time_mean + prior_s,
    }


def _export_json(table: ResultTable, path) -> None:
    prior_by_map = {m.map_id: m.prior_seconds for m in table.maps}
    doc = {
        "format": RESULTS_FORMAT,
        "spec": table.spec_doc,
        "maps": [
            {
                "density": m.density.value,
                "map": m.map_index,
                "seed": m.seed,
                "start": list(m.start),
                "goal": list(m.goal),
                "prior_seconds": m.prior_seconds,
            }
            for m in table.maps
        ],
        "rows": [
            _row_doc(table.rows[key], key, prior_by_map) for key in _row_order(table)
        ],
        "records": [
            {
                "planner": r.planner,
                "map": r.map_id,
                "seed": r.seed,
                "success": r.success,
                "path_length": r.path_length,
                "smoothness": r.smoothness,
                "wall_time": r.wall_time,
            }
            for r in table.records
        ],
    }
    with open(path, "w", encoding="ascii") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")


def load_results(path) -> ResultTable:
    with open(path, "r", encoding="ascii") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    if doc.get("format") != RESULTS_FORMAT:
        raise FormatError(f"{path}: unknown results format {doc.get('format')!r}")
    maps = [
        MapSummary(
            density=Density(m["density"]),
            map_index=m["map"],
            seed=m["seed"],
            start=tuple(m["start"]),
            goal=tuple(m["goal"]),
            prior_seconds=m["prior_seconds"],
        )
        for m in doc["maps"]
    ]
    rows = {
        (r["density"], r["map"], r["planner"]): AggregateRow(
            runs=r["runs"],
            success_rate=r["success_rate"],
            len_mean=r["len_mean"],
            len_std=r["len_std"],
            time_mean=r["time_mean"],
            time_std=r["time_std"],
            smooth_mean=r["smooth_mean"],
            smooth_std=r["smooth_std"],
        )
        for r in doc["rows"]
    }
    records = [
        RunRecord(
            planner=r["planner"],
            map_id=r["map"],
            seed=r["seed"],
            success=r["success"],
            path_length=r["path_length"],
            smoothness=r["smoothness"],
            wall_time=r["wall_time"],
        )
        for r in doc["records"]
    ]
    return ResultTable(spec_doc=doc["spec"], maps=maps, rows=rows, records=records)


def summarize_improvements(table: ResultTable) -> dict:
    """Percent reduction in mean length and smoothness vs the baseline.

    Raises ValueError when the baseline planner is missing from the table.
    """
    planners = [p for p in table.spec_doc["planners"] if p != PLANNER_RRT]
    keys = _row_order(table)
    base_keys = [k for k in keys if k[2] == PLANNER_RRT]
    if not base_keys or not planners:
        raise ValueError("summary needs the baseline planner and at least one other")

    per_map = []
    for density, map_index, _ in base_keys:
        base = table.rows[(density, map_index, PLANNER_RRT)]
        for planner in planners:
            row = table.rows.get((density, map_index, planner))
            if row is None:
                continue
            len_red = 100.0 * (1.0 - row.len_mean / base.len_mean) if base.len_mean else math.nan
            smooth_red = (
                100.0 * (1.0 - row.smooth_mean / base.smooth_mean)
                if base.smooth_mean
                else math.nan
            )
            per_map.append(
                {
                    "density": density,
                    "map": map_index,
                    "planner": planner,
                    "length_reduction_pct": len_red,
                    "smoothness_reduction_pct": smooth_red,
                }
            )

    summary = {}
    for planner in planners:
        lens = [
            e["length_reduction_pct"]
            for e in per_map
            if e["planner"] == planner and math.isfinite(e["length_reduction_pct"])
        ]
        smooths = [
            e["smoothness_reduction_pct"]
            for e in per_map
            if e["planner"] == planner and math.isfinite(e["smoothness_reduction_pct"])
        ]
        summary[planner] = {
            "max_length_reduction_pct": max(lens) if lens else math.nan,
            "mean_length_reduction_pct": sum(lens) / len(lens) if lens else math.nan,
            "smoothness_reduction_range_pct": (
                [min(smooths), max(smooths)] if smooths else [math.nan, math.nan]
            ),
            "mean_smoothness_reduction_pct": (
                sum(smooths) / len(smooths) if smooths else math.nan
            ),
        }
    return {"per_map": per_map, "summary": summary}


def format_improvements(report: dict) -> str:
    lines = []
    for planner, s in report["summary"].items():
        rng = s["smoothness_reduction_range_pct"]
        lines.append(
            f"{planner} vs {PLANNER_RRT}: "
            f"up to {s['max_length_reduction_pct']:.1f}% shorter paths "
            f"(mean {s['mean_length_reduction_pct']:.1f}%), "
            f"smoothness reduction {rng[0]:.1f}%..{rng[1]:.1f}% "
            f"(mean {s['mean_smoothness_reduction_pct']:.1f}%)"
        )
    return "\n".join(lines)

"""Batches of seeded trials, optionally fanned out over worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import io
from .config import TrialConfig
from .evaluation import (GT_COLUMNS, MODES, SUMMARY_COLUMNS, TRIAL_COLUMNS, TrialResult,
                         aggregate, evaluate_against_ground_truth, format_row, trial_row)
from .errors import ConfigError
from .sim.scene import Scene
from .sim.trial import run_trial

PERF_COLUMNS = ["scene", "mode", "seed", "frames", "wall_ms_per_frame", "selection_calls", "control_calls"]

_worker_scene: Scene | None = None


def _init_worker(scene):
    global _worker_scene
    _worker_scene = scene


def _run_one(cfg: TrialConfig) -> TrialResult:
    return run_trial(_worker_scene, cfg)


def trial_configs(base: TrialConfig, modes, n: int, seed: int = 0) -> list[TrialConfig]:
    if n < 1:
        raise ConfigError("trial count must be >= 1")
    if not modes:
        raise ConfigError("at least one mode is required")
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise ConfigError(f"unknown mode(s) {', '.join(bad)}; expected a subset of {', '.join(MODES)}")
    return [base.with_mode(m, seed + i) for m in modes for i in range(n)]


def _order(r: TrialResult):
    return (MODES.index(r.mode), r.seed)


def run_trials(scene: Scene, configs: list[TrialConfig], parallel: int = 1) -> list[TrialResult]:
    """Run every config on ``scene``; results come back sorted by (mode, seed)."""
    if parallel < 1:
        raise ConfigError("parallel must be >= 1")
    if parallel == 1 or len(configs) == 1:
        results = [run_trial(scene, c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=parallel, initializer=_init_worker, initargs=(scene,)) as ex:
            results = list(ex.map(_run_one, configs, chunksize=max(1, len(configs) // (4 * parallel))))
    return sorted(results, key=_order)


def write_results(results: list[TrialResult], out, scene: Scene | None = None, logs: bool = True) -> dict:
    """Write trials/summary (and ground-truth, perf, per-step logs) under ``out``."""
    out = io.ensure_dir(out)
    paths = {"trials": out / "trials.csv", "summary": out / "summary.csv", "perf": out / "perf.csv"}
    io.write_csv(paths["trials"], [trial_row(r) for r in results], TRIAL_COLUMNS)
    io.write_csv(paths["summary"], [format_row(r, SUMMARY_COLUMNS) for r in aggregate(results)],
                 SUMMARY_COLUMNS)
    io.write_csv(paths["perf"], [{"scene": r.scene, "mode": r.mode, "seed": str(r.seed),
                                  "frames": str(r.frames), "wall_ms_per_frame": f"{r.wall_ms_per_frame:.3f}",
                                  "selection_calls": str(r.selection_calls),
                                  "control_calls": str(r.control_calls)} for r in results], PERF_COLUMNS)
    if scene is not None and scene.has_ground_truth and all(r.ground_truth is not None for r in results):
        rows = []
        for mode in MODES:
            sub = [r for r in results if r.mode == mode]
            if sub:
                for row in evaluate_against_ground_truth(sub, scene):
                    rows.append({"mode": mode, **row})
        paths["trials_ground_truth"] = out / "trials_ground_truth.csv"
        io.write_csv(paths["trials_ground_truth"], [trial_row(r, r.ground_truth) for r in results],
                     TRIAL_COLUMNS)
        paths["ground_truth"] = out / "ground_truth.csv"
        io.write_csv(paths["ground_truth"], [format_row(r, ["mode"] + GT_COLUMNS) for r in rows],
                     ["mode"] + GT_COLUMNS)
    if logs:
        log_dir = io.ensure_dir(Path(out) / "logs")
        for r in results:
            if r.log is not None:
                io.write_log(log_dir / f"{r.mode}-{r.seed:05d}.jsonl", r)
    return paths

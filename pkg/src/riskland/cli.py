"""Command-line interface: ``riskland {generate,run,evaluate,dump,config}``.

Errors print one line, ``riskland: error: <category>: <message>``, and exit
with status 2. The default output directory comes from
``$RISKLAND_OUTPUT_DIR`` (falling back to ``./riskland-out``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .config import TrialConfig, apply_overrides, load_config, reference_config
from .errors import ConfigError, RisklandError, SceneLoadError
from .evaluation import MODES, SUMMARY_COLUMNS, aggregate, format_row

RUN_FORMAT = "riskland-run/1"
OUTPUT_ENV = "RISKLAND_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"usage: {message}")


def _default_out(sub: str) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or "riskland-out") / sub


def _parse_modes(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(m).strip().upper() for m in text]
    return [m.strip().upper() for m in str(text).split(",") if m.strip()]


def _parse_sets(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _build_config(config_path, overrides) -> TrialConfig:
    cfg = load_config(config_path) if config_path else TrialConfig()
    return apply_overrides(cfg, overrides) if overrides else cfg


def cmd_generate(args) -> int:
    from .sim.templates import generate
    scene = generate(args.template, args.seed, ground_truth=args.ground_truth)
    out = Path(args.out) if args.out else _default_out("scenes") / f"{args.template}-{args.seed}.json"
    path = io.save_scene(scene, out)
    print(path)
    return 0


def _load_run_manifest(args) -> dict:
    doc: dict = {}
    base = Path(".")
    if args.manifest:
        mpath = Path(args.manifest)
        try:
            doc = json.loads(mpath.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise SceneLoadError(f"cannot read manifest {mpath}: {exc}") from None
        base = mpath.parent
        if doc.get("format") == io.SCENE_FORMAT:
            doc = {"scene": mpath.name}
        elif doc.get("format") != RUN_FORMAT:
            raise ConfigError(f"{mpath}: unknown manifest format {doc.get('format')!r}")
    scene = args.scene or (str(base / doc["scene"]) if doc.get("scene") else None)
    if not scene:
        raise ConfigError("no scene given (use --manifest or --scene)")
    config = args.config or (str(base / doc["config"]) if doc.get("config") else None)
    overrides = dict(doc.get("overrides", {}))
    overrides.update(_parse_sets(args.set))
    run = {
        "scene": scene,
        "config": config,
        "overrides": overrides,
        "modes": _parse_modes(args.modes if args.modes else doc.get("modes", list(MODES))),
        "trials": int(args.trials if args.trials is not None else doc.get("trials", 100)),
        "seed": int(args.seed if args.seed is not None else doc.get("seed", 0)),
        "parallel": int(args.parallel if args.parallel is not None else doc.get("parallel", 1)),
        "out": args.out or (str(base / doc["out"]) if doc.get("out") else str(_default_out("run"))),
    }
    if run["trials"] < 1:
        raise ConfigError("trial count must be >= 1")
    if not run["modes"]:
        raise ConfigError("modes must be nonempty")
    return run


def cmd_run(args) -> int:
    from .config import dump_config
    from .runner import run_trials, trial_configs, write_results
    run = _load_run_manifest(args)
    scene = io.load_scene(run["scene"])
    cfg = _build_config(run["config"], run["overrides"])
    if args.check_invariants:
        cfg = apply_overrides(cfg, {"run.check_invariants": "true"})
    configs = trial_configs(cfg, run["modes"], run["trials"], run["seed"])
    results = run_trials(scene, configs, run["parallel"])
    out = io.ensure_dir(run["out"])
    write_results(results, out, scene, logs=not args.no_logs)
    (out / "config.ini").write_text(dump_config(cfg), encoding="utf-8")
    for row in aggregate(results):
        r = format_row(row, SUMMARY_COLUMNS)
        print(f"{r['scene']} {r['mode']}: succ {r['succ_pct']}% risk {r['risk_pct']}% "
              f"prox {r['prox_m']} m time {r['time_s']} s (n={r['n']})")
    return 0


def cmd_evaluate(args) -> int:
    results = io.results_from_rows(io.read_csv(args.trials))
    if not results:
        raise ConfigError(f"{args.trials} contains no trials")
    out = io.ensure_dir(args.out or Path(args.trials).parent)
    rows = [format_row(r, SUMMARY_COLUMNS) for r in aggregate(results)]
    io.write_csv(out / "summary.csv", rows, SUMMARY_COLUMNS)
    print(out / "summary.csv")
    return 0


def cmd_dump(args) -> int:
    from .dump import dump_frames
    scene = io.load_scene(args.scene)
    cfg = _build_config(args.config, _parse_sets(args.set)).with_mode(args.mode.upper(), args.seed)
    try:
        frames = [int(f) for f in args.frames.split(",") if f.strip()]
    except ValueError:
        raise ConfigError(f"--frames expects comma-separated integers, got {args.frames!r}") from None
    out = args.out or _default_out("dump")
    for p in dump_frames(scene, cfg, frames, out):
        print(p)
    return 0


def cmd_config(args) -> int:
    text = reference_config()
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot write {args.out}: {exc}") from None
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="riskland", description="Risk-aware emergency landing simulator.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("generate", help="write a procedural scene (manifest + label raster)")
    g.add_argument("--template", required=True, help="park+road, plaza+pedestrians, parking-lot, "
                   "dense-crossing, open-field or road-corridor")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="manifest path (.json) or directory")
    g.add_argument("--ground-truth", action="store_true", help="mark the rendered composite as ground truth")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run seeded trials and write CSVs and logs")
    r.add_argument("--manifest", help="run manifest (or a scene manifest)")
    r.add_argument("--scene", help="scene manifest; overrides the run manifest")
    r.add_argument("--trials", type=int)
    r.add_argument("--seed", type=int, help="base seed; trials use seed .. seed+n-1")
    r.add_argument("--modes", help="comma-separated subset of SU,SC,DU,DC")
    r.add_argument("--parallel", type=int)
    r.add_argument("--out")
    r.add_argument("--config", help="INI config file")
    r.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="config override")
    r.add_argument("--check-invariants", action="store_true", help="verify risk-memory monotonicity")
    r.add_argument("--no-logs", action="store_true", help="skip per-step JSONL logs")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("evaluate", help="recompute summary.csv from a trials.csv")
    e.add_argument("--trials", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    d = sub.add_parser("dump", help="write per-frame risk / cost map images")
    d.add_argument("--scene", required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--frames", default="0")
    d.add_argument("--mode", default="DC")
    d.add_argument("--out")
    d.add_argument("--config")
    d.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    d.set_defaults(func=cmd_dump)

    c = sub.add_parser("config", help="print or write the reference configuration")
    c.add_argument("--out")
    c.set_defaults(func=cmd_config)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except RisklandError as exc:
        msg = " ".join(str(exc).split())
        print(f"riskland: error: {exc.category}: {msg}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"riskland: error: io: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

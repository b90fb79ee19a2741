"""On-disk formats: scene manifests, label rasters, result CSVs, step logs, images.

Scene manifest (JSON)::

    {
      "format": "riskland-scene/1",
      "name": "park+road-1", "template": "park+road",
      "base_labels": "park+road-1.png",      # 8-bit single-channel class ids
      "resolution": 0.05, "origin": [0.0, 0.0], "duration": 150.0,
      "class_names": {"0": "grass", ...},
      "sample_region": [xmin, ymin, xmax, ymax],
      "obstacles": [{"class_id": 6, "size": [w, h], "waypoints": [[t, x, y], ...]}],
      "ground_truth": null | "composite" | [{"t": 0.0, "raster": "gt-000.png"}],
      "meta": {}
    }

Raster paths are relative to the manifest. Step logs are JSON lines: one
header record per trial followed by one record per frame.
"""

from __future__ import annotations

import csv
import io as _io
import json
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ConfigError, SceneLoadError
from .evaluation import LandingMetrics, TrialResult
from .sim.scene import Obstacle, Scene

SCENE_FORMAT = "riskland-scene/1"


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def write_png(path, array: np.ndarray):
    arr = np.ascontiguousarray(array, dtype=np.uint8)
    Image.fromarray(arr).save(path, format="PNG", optimize=False)


def read_png(path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "P"):
                raise SceneLoadError(f"{path}: expected an 8-bit single-channel image, got mode {img.mode}")
            return np.array(img, dtype=np.uint8)
    except (OSError, ValueError) as exc:
        raise SceneLoadError(f"cannot read raster {path}: {exc}") from None


def scene_to_manifest(scene: Scene, raster_name: str, gt_names=None) -> dict:
    if scene.ground_truth is None or isinstance(scene.ground_truth, str):
        gt = scene.ground_truth
    else:
        gt = [{"t": float(t), "raster": n} for (t, _), n in zip(scene.ground_truth, gt_names)]
    return {
        "format": SCENE_FORMAT,
        "name": scene.name,
        "template": scene.template,
        "base_labels": raster_name,
        "resolution": scene.resolution,
        "origin": list(scene.origin),
        "duration": scene.duration,
        "class_names": {str(k): v for k, v in sorted(scene.class_names.items())},
        "sample_region": [float(v) for v in scene.sample_region],
        "obstacles": [{"class_id": int(o.class_id), "size": [float(o.size[0]), float(o.size[1])],
                       "waypoints": o.waypoints.tolist()} for o in scene.obstacles],
        "ground_truth": gt,
        "meta": scene.meta,
    }


def save_scene(scene: Scene, path) -> Path:
    """Write ``<path>`` (manifest) plus its label raster(s) next to it."""
    path = Path(path)
    if path.suffix != ".json":
        path = path / f"{_slug(scene.name)}.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        raster = path.with_suffix(".png").name
        write_png(path.parent / raster, scene.base_labels)
        gt_names = None
        if isinstance(scene.ground_truth, list):
            gt_names = []
            for i, (_, r) in enumerate(scene.ground_truth):
                name = f"{path.stem}-gt-{i:03d}.png"
                write_png(path.parent / name, r)
                gt_names.append(name)
        text = json.dumps(scene_to_manifest(scene, raster, gt_names), indent=1, sort_keys=False)
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write scene to {path}: {exc}") from None
    return path


def load_scene(path) -> Scene:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise SceneLoadError(f"cannot read scene manifest {path}: {exc}") from None
    if doc.get("format") != SCENE_FORMAT:
        raise SceneLoadError(f"{path}: not a scene manifest (format {doc.get('format')!r})")
    root = path.parent
    try:
        labels = read_png(root / doc["base_labels"])
        obstacles = [Obstacle(int(o["class_id"]), tuple(o["size"]), np.array(o["waypoints"], dtype=float))
                     for o in doc.get("obstacles", [])]
        gt = doc.get("ground_truth")
        if isinstance(gt, list):
            gt = [(float(f["t"]), read_png(root / f["raster"])) for f in gt]
        elif gt not in (None, "composite"):
            raise SceneLoadError(f"{path}: ground_truth must be null, 'composite' or a frame list")
        return Scene(labels, float(doc["resolution"]), obstacles, float(doc["duration"]),
                     tuple(doc.get("origin", (0.0, 0.0))),
                     {int(k): v for k, v in doc["class_names"].items()},
                     tuple(doc["sample_region"]) if doc.get("sample_region") else None,
                     gt, doc.get("name", path.stem), doc.get("template"), dict(doc.get("meta", {})))
    except KeyError as exc:
        raise SceneLoadError(f"{path}: missing field {exc}") from None
    except ConfigError as exc:
        raise SceneLoadError(f"{path}: {exc}") from None


def write_csv(path, rows, columns):
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in columns})
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _opt(v, cast=float):
    return None if v in ("", None) else cast(v)


def results_from_rows(rows) -> list[TrialResult]:
    """Rebuild the aggregate-relevant part of trial results from ``trials.csv``."""
    out = []
    for r in rows:
        m = LandingMetrics(int(r["succ"]), float(r["risk"]), float(r["prox"]), bool(int(r["prox_sentinel"])),
                           int(r["w1"]), int(r["w2"]), _opt(r["iou"]), int(r["iou_frames"]))
        out.append(TrialResult(r["scene"], r["mode"], int(r["seed"]), bool(int(r["landed"])),
                               float(r["landing_x"]), float(r["landing_y"]), _opt(r["time"]), m,
                               frames=int(r["frames"])))
    return out


def write_log(path, result: TrialResult):
    header = {"type": "trial", "scene": result.scene, "mode": result.mode, "seed": result.seed,
              "start": [round(v, 6) for v in result.log.start], "phase": round(result.log.phase, 6),
              "landed": result.landed, "t_end": round(result.log.t_end, 6),
              "selection_calls": result.selection_calls, "control_calls": result.control_calls,
              "memory_violations": result.memory_violations}
    lines = [json.dumps(header)] + [json.dumps(rec) for rec in result.log.records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_log(path) -> tuple[dict, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        recs = [json.loads(line) for line in fh if line.strip()]
    return recs[0], recs[1:]


def ensure_dir(path) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {p}: {exc}") from None
    if not os.access(p, os.W_OK):
        raise ConfigError(f"output directory {p} is not writable")
    return p
